#include "stam/analysis.hpp"

#include "stam/format.hpp"

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace stam {

double binary_entropy(double p) {
  auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
  p = std::clamp(p, 0.0, 1.0);
  return term(p) + term(1.0 - p);
}

static double entropy_bits(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (double v : eigenvalues)
    if (v > 0.0) s -= v * std::log2(v);
  return s;
}

double entanglement_entropy(const StateVector& psi) {
  if (psi.qubit_levels() != 2) throw std::invalid_argument("entanglement_entropy: qubit (x) boson state expected");
  return entropy_bits(partial_trace_qubit(psi).eigenvalues());
}

double boson_entropy(const StateVector& psi) {
  if (psi.qubit_levels() != 2) throw std::invalid_argument("boson_entropy: qubit (x) boson state expected");
  const int d = psi.dim();
  Matrix m(d, 2);
  m.col(0) = psi.block(0);
  m.col(1) = psi.block(1);
  const Matrix rho = m * m.adjoint();
  return entropy_bits(Eigen::SelfAdjointEigenSolver<Matrix>(rho, Eigen::EigenvaluesOnly).eigenvalues());
}

double cat_entropy(double alpha) { return binary_entropy(0.5 * (1.0 + std::exp(-2.0 * alpha * alpha))); }

Complex coherent_trajectory_analytic(double theta_prev, double lambda_k, Complex epsilon, double omega_c, double t) {
  const Complex phi = (theta_prev - lambda_k) * std::polar(1.0, -omega_c * t) + lambda_k;
  return phi * epsilon;
}

// ---------------------------------------------------------------------------

TraceRecorder::TraceRecorder(TraceTargets targets) : targets_(std::move(targets)) {}

void TraceRecorder::record(const Sample& s) {
  TraceRow row;
  row.t = s.t;
  row.lambda = s.lambda;
  row.norm = s.state.norm();
  row.a = expect_a(s.state);
  if (targets_.target) row.fidelity_target = fidelity(*targets_.target, s.state);
  if (targets_.instantaneous) {
    if (!cached_lambda_ || *cached_lambda_ != s.lambda) {
      cached_state_ = targets_.instantaneous(s.lambda);
      cached_lambda_ = s.lambda;
    }
    row.fidelity_instantaneous = fidelity(*cached_state_, s.state);
  }
  if (s.state.qubit_levels() == 2) row.entropy = entanglement_entropy(s.state);
  if (s.checkpoint > 0 && targets_.checkpoint)
    checkpoint_fidelities_.push_back(fidelity(targets_.checkpoint(s.checkpoint), s.state));
  if (!rows_.empty() && rows_.back().t == row.t)
    rows_.back() = row;
  else
    rows_.push_back(row);
}

double TraceRecorder::min_checkpoint_fidelity() const {
  double m = 1.0;
  for (double f : checkpoint_fidelities_) m = std::min(m, f);
  return m;
}

static std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void TraceRecorder::write_csv(std::ostream& os) const {
  os << "t_us,fidelity_target,fidelity_instantaneous,entropy,re_a,im_a,norm,lambda\n";
  for (const auto& r : rows_)
    os << format_double(r.t * 1e6) << ',' << opt(r.fidelity_target) << ',' << opt(r.fidelity_instantaneous)
       << ',' << opt(r.entropy) << ',' << format_double(r.a.real()) << ',' << format_double(r.a.imag()) << ','
       << format_double(r.norm) << ',' << format_double(r.lambda) << '\n';
}

// ---------------------------------------------------------------------------

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min<int>(n, int(std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

static bool state_converged(const StateVector& s) { return edge_weight(s, s.dim() / 10) < 1e-10; }

std::vector<Miscalibration> cross_grid(const std::vector<double>& deltas) {
  std::vector<Miscalibration> out;
  bool zero = false;
  for (double d : deltas) {
    if (d == 0.0) {
      if (!zero) out.push_back({0.0, 0.0});
      zero = true;
      continue;
    }
    out.push_back({d, 0.0});
    out.push_back({0.0, d});
  }
  return out;
}

ScanResult robustness_scan_boson(const BosonScanSpec& spec) {
  ScanResult res;
  res.theta = spec.theta;
  res.omega_c = spec.omega_c;
  res.dim = spec.dim;
  for (const auto& e : spec.errors)
    for (int n : spec.n_pulses) res.cells.push_back({e.delta_lambda, e.delta_omega, n, 0.0, false});
  const FockSpace space(spec.dim, spec.omega_c);
  const StateVector target = spec.hybrid ? hybrid_cat(space, spec.theta) : coherent_state(space, spec.theta);
  const StateVector start = spec.hybrid ? tensor_qubit(Eigen::Vector2cd(1.0, 0.0), fock_state(space, 0))
                                        : fock_state(space, 0);
  parallel_for(int(res.cells.size()), [&](int i) {
    ScanCell& c = res.cells[i];
    const Miscalibration err{c.delta_lambda, c.delta_omega};
    try {
      const PulseSequence seq = spec.hybrid ? build_hybrid_sequence(spec.theta, c.n_pulses, space, err)
                                            : build_boson_sequence(make_plan(1, 1.0, spec.theta, c.n_pulses,
                                                                             spec.omega_c),
                                                                   space, false, err);
      const StateVector out = run_sequence(seq, start);
      c.fidelity = fidelity(target, out);
      c.converged = state_converged(out);
    } catch (const std::runtime_error&) {
      c.fidelity = 0.0;
      c.converged = false;
    }
  });
  return res;
}

void ScanResult::write_csv(std::ostream& os) const {
  os << "delta_lambda,delta_omega,n_pulses,fidelity,converged\n";
  for (const auto& c : cells)
    os << format_double(c.delta_lambda) << ',' << format_double(c.delta_omega) << ',' << c.n_pulses << ','
       << format_double(c.fidelity) << ',' << (c.converged ? "true" : "false") << '\n';
}

const ScanCell& ScanResult::at(double delta_lambda, double delta_omega, int n_pulses) const {
  for (const auto& c : cells)
    if (c.delta_lambda == delta_lambda && c.delta_omega == delta_omega && c.n_pulses == n_pulses) return c;
  throw std::out_of_range("ScanResult: no such cell");
}

double amplified_fidelity(const FockSpace& space, const AmplifiedOptions& options) {
  const PulseSequence seq = build_amplified_sequence(space, options);
  const StateVector start = tensor_qubit(Eigen::Vector2cd(1.0, 0.0), fock_state(space, 0));
  const StateVector out = run_sequence(seq, start);
  return fidelity(hybrid_cat(space, 2.0 * options.n_pulses * options.lambda), out);
}

QubitScanResult robustness_scan_qubit(const QubitScanSpec& spec) {
  QubitScanResult res;
  res.lambda = spec.lambda;
  res.dim = spec.dim;
  for (double d : spec.deltas)
    for (int n : spec.n_pulses) res.cells.push_back({d, n, 0.0, false});
  const FockSpace space(spec.dim, spec.omega_c);
  parallel_for(int(res.cells.size()), [&](int i) {
    QubitScanCell& c = res.cells[i];
    AmplifiedOptions o;
    o.lambda = spec.lambda;
    o.n_pulses = c.n_pulses;
    o.omega_c = spec.omega_c;
    o.Omega = spec.Omega;
    o.delta = c.delta;
    o.coupling_during_flip = spec.coupling_during_flip;
    o.alternate_ctrl_sign = spec.alternate_ctrl_sign;
    try {
      const PulseSequence seq = build_amplified_sequence(space, o);
      const StateVector start = tensor_qubit(Eigen::Vector2cd(1.0, 0.0), fock_state(space, 0));
      const StateVector out = run_sequence(seq, start);
      c.fidelity = fidelity(hybrid_cat(space, 2.0 * c.n_pulses * spec.lambda), out);
      c.converged = state_converged(out);
    } catch (const std::runtime_error&) {
      c.fidelity = 0.0;
      c.converged = false;
    }
  });
  return res;
}

void QubitScanResult::write_csv(std::ostream& os) const {
  os << "delta_qubit,n_pulses,fidelity,converged\n";
  for (const auto& c : cells)
    os << format_double(c.delta) << ',' << c.n_pulses << ',' << format_double(c.fidelity) << ','
       << (c.converged ? "true" : "false") << '\n';
}

const QubitScanCell& QubitScanResult::at(double delta, int n_pulses) const {
  for (const auto& c : cells)
    if (c.delta == delta && c.n_pulses == n_pulses) return c;
  throw std::out_of_range("QubitScanResult: no such cell");
}

AuditReport convergence_audit(const std::function<double(int)>& run, int dim, double tolerance) {
  AuditReport r;
  r.dim = dim;
  r.dim_doubled = 2 * dim;
  try {
    r.fidelity = run(dim);
    r.fidelity_doubled = run(2 * dim);
    r.delta = std::abs(r.fidelity_doubled - r.fidelity);
    r.passed = r.delta < tolerance;
  } catch (const std::runtime_error&) {
    r.delta = std::numeric_limits<double>::infinity();
    r.passed = false;
  }
  return r;
}

}  // namespace stam
