#include "stam/evolution.hpp"

#include <cmath>

namespace stam {

double Schedule::lambda(double t) const {
  const double s = t / T - 1.0;
  return A * std::exp(-B * s * s) - C;
}

void Schedule::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("Schedule: T must be positive");
  const double start = lambda(0.0), end = end_value();
  if (std::abs(start) > 0.01 * std::abs(end))
    throw std::invalid_argument("Schedule: |lambda(0)| exceeds 1% of |lambda(T)|");
  const int grid = 10000;
  const double dir = end >= start ? 1.0 : -1.0;
  double prev = start;
  for (int i = 1; i <= grid; ++i) {
    const double v = lambda(T * i / grid);
    if (dir * (v - prev) < 0.0) throw std::invalid_argument("Schedule: lambda(t) is not monotonic on [0, T]");
    prev = v;
  }
}

double PulseSequence::total_time() const {
  double t = 0.0;
  for (const auto& s : segments)
    if (s.advances_clock) t += s.duration;
  return t;
}

void PulseSequence::append(const PulseSequence& other) {
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
}

int PulseSequence::checkpoint_count() const {
  int n = 0;
  for (const auto& s : segments) n += s.checkpoint ? 1 : 0;
  return n;
}

StateVector propagate_const(const BandedOperator& h, double t, const StateVector& psi,
                            const Observer& observer, int samples, const KrylovOptions& options,
                            double lambda) {
  if (!(t >= 0.0)) throw std::invalid_argument("propagate_const: t must be >= 0");
  if (!observer || samples <= 0) {
    StateVector out = expm_action(h, t, psi, options);
    if (observer) {
      observer({0.0, lambda, psi, 0, 0});
      observer({t, lambda, out, 0, 0});
    }
    return out;
  }
  observer({0.0, lambda, psi, 0, 0});
  StateVector cur = psi;
  const int pieces = samples + 1;
  for (int i = 1; i <= pieces; ++i) {
    const double dt = t * i / pieces - t * (i - 1) / pieces;
    cur = expm_action(h, dt, cur, options);
    observer({t * i / pieces, lambda, cur, 0, 0});
  }
  return cur;
}

StateVector propagate_schedule(const HamiltonianBuilder& builder, const Schedule& schedule,
                               const StateVector& psi, long steps, const Observer& observer, int samples,
                               const KrylovOptions& options) {
  if (steps < 1) throw std::invalid_argument("propagate_schedule: steps must be >= 1");
  const double T = schedule.T;
  const long every = samples > 0 ? std::max(1L, steps / samples) : steps;
  StateVector cur = psi;
  if (observer) observer({0.0, schedule.lambda(0.0), cur, -1, 0});
  for (long i = 0; i < steps; ++i) {
    const double t0 = T * double(i) / double(steps);
    const double t1 = T * double(i + 1) / double(steps);
    const BandedOperator h = builder(schedule.lambda(0.5 * (t0 + t1)));
    cur = expm_action(h, t1 - t0, cur, options);
    if (observer && ((i + 1) % every == 0 || i + 1 == steps))
      observer({t1, schedule.lambda(t1), cur, int(std::min<long>(i, INT32_MAX)), 0});
  }
  return cur;
}

ScheduleResult propagate_schedule_converged(const HamiltonianBuilder& builder, const Schedule& schedule,
                                            const StateVector& psi, long initial_steps, double tolerance,
                                            int max_doublings, const Observer& observer, int samples,
                                            const KrylovOptions& options) {
  long steps = std::max(1L, initial_steps);
  StateVector prev = propagate_schedule(builder, schedule, psi, steps, {}, 0, options);
  double diff = 0.0;
  for (int i = 0; i < max_doublings; ++i) {
    steps *= 2;
    StateVector next = propagate_schedule(builder, schedule, psi, steps, {}, 0, options);
    diff = (next.amplitudes() - prev.amplitudes()).norm();
    if (diff <= tolerance) {
      if (observer) next = propagate_schedule(builder, schedule, psi, steps, observer, samples, options);
      return {std::move(next), steps, diff};
    }
    prev = std::move(next);
  }
  throw ConvergenceError("propagate_schedule: step doubling did not converge", diff);
}

StateVector run_sequence(const PulseSequence& seq, const StateVector& psi, const Observer& observer,
                         int samples_per_segment, const KrylovOptions& options) {
  StateVector cur = psi;
  double t = 0.0;
  int checkpoints = 0;
  if (observer)
    observer({0.0, seq.segments.empty() ? 0.0 : seq.segments.front().lambda, cur, -1, 0});
  for (std::size_t i = 0; i < seq.segments.size(); ++i) {
    const Segment& s = seq.segments[i];
    if (!s.hamiltonian) throw std::invalid_argument("run_sequence: segment without Hamiltonian");
    const int pieces = (observer && s.advances_clock) ? samples_per_segment + 1 : 1;
    for (int p = 1; p <= pieces; ++p) {
      const double dt = s.duration * p / pieces - s.duration * (p - 1) / pieces;
      cur = expm_action(*s.hamiltonian, dt, cur, options);
      if (!observer || p == pieces) continue;
      observer({t + (s.advances_clock ? s.duration * p / pieces : 0.0), s.lambda, cur, int(i), 0});
    }
    if (s.advances_clock) t += s.duration;
    if (s.checkpoint) ++checkpoints;
    if (observer) observer({t, s.lambda, cur, int(i), s.checkpoint ? checkpoints : 0});
  }
  return cur;
}

double generator_leakage(const FockSpace& space, const MultiSqueezeSpec& spec, double lambda) {
  const StateVector s = expm_action(generator_G(space, spec), lambda, fock_state(space, 0));
  return edge_weight(s, std::max(2 * spec.J, space.dim() / 10));
}

PulseSequence composite_pulse(const FockSpace& space, const MultiSqueezeSpec& spec, double lambda_k,
                              double max_leakage) {
  const double leak = generator_leakage(space, spec, lambda_k);
  if (leak > max_leakage)
    throw TruncationError("composite_pulse: generator leakage " + std::to_string(leak) + " at dim " +
                              std::to_string(space.dim()),
                          leak);
  const auto g = std::make_shared<const BandedOperator>(generator_G(space, spec));
  const double t_p = kPi / (spec.J * space.omega_c());
  PulseSequence seq;
  seq.segments.push_back({std::make_shared<const BandedOperator>(*g * -lambda_k), 1.0, false,
                          "generator_in", lambda_k, false});
  seq.segments.push_back(
      {std::make_shared<const BandedOperator>(free_hamiltonian(space)), t_p, false, "free", lambda_k, true});
  seq.segments.push_back({std::make_shared<const BandedOperator>(*g * lambda_k), 1.0, false,
                          "generator_out", lambda_k, false});
  return seq;
}

Matrix sequence_unitary(const PulseSequence& seq) {
  if (seq.segments.empty()) throw std::invalid_argument("sequence_unitary: empty sequence");
  const Eigen::Index n = seq.segments.front().hamiltonian->size();
  Matrix u = Matrix::Identity(n, n);
  for (const auto& s : seq.segments) u = propagator_dense(*s.hamiltonian, s.duration) * u;
  return u;
}

}  // namespace stam
