#include "stam/stam.hpp"

#include <Eigen/SVD>
#include <json.hpp>

#include <cmath>
#include <numeric>

namespace stam {

StamPlan make_plan(int J, Complex epsilon, double theta, int n_pulses, double omega_c) {
  if (n_pulses < 1) throw std::invalid_argument("make_plan: N must be >= 1");
  if (J < 1) throw std::invalid_argument("make_plan: J must be >= 1");
  if (!(omega_c > 0.0)) throw std::invalid_argument("make_plan: omega_c must be positive");
  if (!std::isfinite(theta)) throw std::invalid_argument("make_plan: Theta must be finite");
  StamPlan p;
  p.J = J;
  p.epsilon = epsilon;
  p.theta = theta;
  p.n_pulses = n_pulses;
  p.omega_c = omega_c;
  p.t_p = kPi / (J * omega_c);
  for (int k = 1; k <= n_pulses; ++k) p.lambdas.push_back(theta * (2.0 * k - 1.0) / (2.0 * n_pulses));
  for (int k = 0; k <= n_pulses; ++k) p.checkpoints.push_back(theta * k / n_pulses);
  return p;
}

std::string plan_json(const StamPlan& plan) {
  nlohmann::ordered_json j;
  j["J"] = plan.J;
  j["epsilon_re"] = plan.epsilon.real();
  j["epsilon_im"] = plan.epsilon.imag();
  j["theta"] = plan.theta;
  j["n_pulses"] = plan.n_pulses;
  j["omega_c"] = plan.omega_c;
  j["lambdas"] = plan.lambdas;
  j["t_p"] = plan.t_p;
  return j.dump(2);
}

Rational sign_integral(int n_pulses, int k) {
  if (n_pulses < 1) throw std::invalid_argument("sign_integral: N must be >= 1");
  if (k < 0 || k > n_pulses) throw std::invalid_argument("sign_integral: k outside [0, N]");
  // Unit Theta / (2N): lambda_j = 2j - 1, Theta_k = 2k, Theta = 2N.
  const long long end = 2LL * k;
  long long acc = 0;
  for (long long j = 0; j <= n_pulses; ++j) {
    const long long lo = j == 0 ? 0 : 2 * j - 1;
    const long long hi = j == n_pulses ? 2LL * n_pulses : 2 * j + 1;
    const long long len = std::max(0LL, std::min(hi, end) - lo);
    acc += (j % 2 == 0 ? 1 : -1) * len;
  }
  const long long den = 2LL * n_pulses;
  const long long g = std::gcd(acc, den);
  return {acc / g, den / g};
}

bool sign_cancellation_exact(int n_pulses) {
  for (int k = 0; k <= n_pulses; ++k)
    if (sign_integral(n_pulses, k).num != 0) return false;
  return true;
}

StateVector adiabatic_state(const FockSpace& space, const MultiSqueezeSpec& spec, double lambda, int n) {
  if (spec.J == 1 && n == 0) return coherent_state(space, lambda * spec.epsilon);
  KrylovOptions opt;
  opt.tolerance = 1e-13;
  return expm_action(generator_G(space, spec), lambda, fock_state(space, n), opt);
}

PulseSequence build_boson_sequence(const StamPlan& plan, const FockSpace& space, bool use_composite,
                                   const Miscalibration& error, int padding) {
  const FockSpace actual(space.dim(), (1.0 + error.delta_omega) * plan.omega_c);
  const MultiSqueezeSpec spec = plan.spec();
  PulseSequence seq;
  for (int k = 1; k <= plan.n_pulses; ++k) {
    const double lam = (1.0 + error.delta_lambda) * plan.lambdas[k - 1];
    if (use_composite) {
      PulseSequence c = composite_pulse(actual, spec, lam);
      c.segments[1].duration = plan.t_p;
      c.segments.back().checkpoint = true;
      for (auto& s : c.segments) s.label += " " + std::to_string(k);
      seq.append(c);
    } else {
      seq.segments.push_back({std::make_shared<const BandedOperator>(
                                  multi_squeeze_hamiltonian(actual, spec, lam, padding)),
                              plan.t_p, true, "pulse " + std::to_string(k), lam, true});
    }
  }
  return seq;
}

PulseSequence build_hybrid_sequence(double theta, int n_pulses, const FockSpace& space,
                                    const Miscalibration& error) {
  const StamPlan plan = make_plan(1, 1.0, theta, n_pulses, space.omega_c());
  PulseSequence seq;
  for (int k = 1; k <= n_pulses; ++k) {
    HybridSpec h;
    h.lambda = (1.0 + error.delta_lambda) * plan.lambdas[k - 1];
    h.omega_c = (1.0 + error.delta_omega) * plan.omega_c;
    seq.segments.push_back({std::make_shared<const BandedOperator>(hybrid_hamiltonian(space, h)), plan.t_p,
                            true, "pulse " + std::to_string(k), h.lambda, true});
  }
  return seq;
}

StateVector hybrid_cat(const FockSpace& space, double theta) {
  const Vector plus = coherent_state(space, theta).amplitudes();
  const Vector minus = coherent_state(space, -theta).amplitudes();
  const int d = space.dim();
  Vector v(2 * d);
  v.head(d) = 0.5 * (plus + minus);
  v.tail(d) = 0.5 * (plus - minus);
  return StateVector(space, 2, v / v.norm());
}

PulseSequence build_amplified_sequence(const FockSpace& space, const AmplifiedOptions& o) {
  if (o.n_pulses < 1) throw std::invalid_argument("build_amplified_sequence: N must be >= 1");
  if (!(o.Omega > 0.0) || !(o.omega_c > 0.0))
    throw std::invalid_argument("build_amplified_sequence: frequencies must be positive");
  HybridSpec h;
  h.lambda = o.lambda;
  h.omega_c = o.omega_c;
  h.sign = 1;
  h.Omega = o.Omega;
  h.delta = o.delta;
  const auto boson = std::make_shared<const BandedOperator>(hybrid_hamiltonian(space, h));
  std::shared_ptr<const BandedOperator> flip[2];
  for (int parity = 0; parity < 2; ++parity) {
    if (o.instantaneous_flip) {
      HybridSpec unit = h;
      unit.Omega = kPi;
      unit.delta = 0.0;
      flip[parity] = std::make_shared<const BandedOperator>(qubit_control_hamiltonian(space, unit, parity));
    } else {
      BandedOperator ctrl = qubit_control_hamiltonian(space, h, parity);
      if (o.coupling_during_flip) ctrl = ctrl + *boson;
      flip[parity] = std::make_shared<const BandedOperator>(std::move(ctrl));
    }
  }
  PulseSequence seq;
  const double t_b = kPi / o.omega_c;
  const double t_flip = kPi / o.Omega;
  const bool shorten = o.synchronized && o.coupling_during_flip && !o.instantaneous_flip;
  if (shorten && t_flip >= t_b)
    throw std::invalid_argument("build_amplified_sequence: qubit pi pulse longer than a bosonic pulse");
  for (int k = 1; k <= o.n_pulses; ++k) {
    const double t_k = (shorten && k < o.n_pulses) ? t_b - t_flip : t_b;
    seq.segments.push_back({boson, t_k, true, "pulse " + std::to_string(k), o.lambda, true});
    if (k == o.n_pulses) break;
    const int parity = o.alternate_ctrl_sign ? k % 2 : 0;
    if (o.instantaneous_flip)
      seq.segments.push_back({flip[parity], 1.0, false, "flip " + std::to_string(k), o.lambda, false});
    else
      seq.segments.push_back({flip[parity], t_flip, false, "flip " + std::to_string(k), o.lambda, true});
  }
  return seq;
}

Decomposition adiabatic_decomposition(const Matrix& u, double lambda_end, double t_elapsed,
                                      const FockSpace& space, const MultiSqueezeSpec& spec,
                                      Eigen::Index interior) {
  const int d = space.dim();
  if (u.rows() != d || u.cols() != d) throw std::invalid_argument("adiabatic_decomposition: shape mismatch");
  if (d > 512) throw std::invalid_argument("adiabatic_decomposition: dense regime only (dim <= 512)");
  const Matrix eg = expm_dense(Complex(0.0, -lambda_end) * generator_G(space, spec).to_dense());
  Eigen::VectorXcd phases(d);
  for (int n = 0; n < d; ++n) phases(n) = std::polar(1.0, -n * space.omega_c() * t_elapsed);
  Decomposition out;
  out.u_adia = eg * phases.asDiagonal();
  out.u_err = out.u_adia.adjoint() * u;
  interior = std::clamp<Eigen::Index>(interior, 1, d);
  const Matrix diff = out.u_err.topLeftCorner(interior, interior) - Matrix::Identity(interior, interior);
  out.distance = Eigen::BDCSVD<Matrix>(diff).singularValues()(0);
  return out;
}

Matrix W_operator(double, double t_elapsed, const MultiSqueezeSpec& spec, const FockSpace& space) {
  const int d = space.dim();
  Matrix w = Matrix::Zero(d, d);
  for (int n = 0; n < d; ++n)
    for (int m : {n - spec.J, n + spec.J}) {
      if (m < 0 || m >= d) continue;
      const double dphi = (n - m) * space.omega_c() * t_elapsed;
      w(n, m) = std::polar(1.0, dphi) * coupling_g(n, m, spec);
    }
  return w;
}

std::optional<int> common_sign(double t_elapsed, const MultiSqueezeSpec& spec, const FockSpace& space) {
  const Matrix w = W_operator(0.0, t_elapsed, spec, space);
  std::optional<int> sign;
  for (int n = 0; n + spec.J < space.dim(); ++n)
    for (auto [r, c] : {std::pair{n + spec.J, n}, std::pair{n, n + spec.J}}) {
      const Complex f = w(r, c) / coupling_g(r, c, spec);
      int s = 0;
      if (std::abs(f - 1.0) < 1e-9) s = 1;
      else if (std::abs(f + 1.0) < 1e-9) s = -1;
      if (s == 0 || (sign && *sign != s)) return std::nullopt;
      sign = s;
    }
  return sign;
}

PhaseLedger phase_ledger(const FockSpace& space, int J, double t_elapsed) {
  PhaseLedger l;
  l.J = J;
  l.groups = bipartition(J, space.dim());
  l.phases.resize(space.dim());
  for (int n = 0; n < space.dim(); ++n) l.phases(n) = n * space.omega_c() * t_elapsed;
  return l;
}

std::optional<int> parity_check(const PhaseLedger& ledger, double tol) {
  const int d = int(ledger.phases.size());
  std::optional<int> ratio;
  for (int r = 0; r < std::min(ledger.J, d); ++r)
    for (int n = r + ledger.J; n < d; n += ledger.J) {
      const Complex rel = std::polar(1.0, ledger.phases(n) - ledger.phases(r));
      const bool same_group = ledger.groups[n] == ledger.groups[r];
      int s = 0;
      if (std::abs(rel - 1.0) < tol) s = 1;
      else if (std::abs(rel + 1.0) < tol) s = -1;
      if (s == 0) return std::nullopt;
      if (same_group) {
        if (s != 1) return std::nullopt;
      } else {
        if (ratio && *ratio != s) return std::nullopt;
        ratio = s;
      }
    }
  return ratio;
}

}  // namespace stam
