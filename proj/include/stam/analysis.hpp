#ifndef STAM_ANALYSIS_HPP_
#define STAM_ANALYSIS_HPP_

#include "stam/stam.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace stam {

/// H2(p) in bits with 0 log 0 = 0.
double binary_entropy(double p);

/// von Neumann entropy (bits) of the qubit's reduced state.
double entanglement_entropy(const StateVector& psi);

/// Same quantity from the boson's reduced density matrix (dense eigensolve).
double boson_entropy(const StateVector& psi);

/// Entropy of (|a>|+> - |-a>|->)/sqrt(2): H2((1 + e^{-2 a^2}) / 2).
double cat_entropy(double alpha);

/// Phi(t) eps, Phi(t) = (Theta_prev - lambda_k) e^{-i omega_c t} + lambda_k.
Complex coherent_trajectory_analytic(double theta_prev, double lambda_k, Complex epsilon, double omega_c,
                                     double t);

struct TraceRow {
  double t;  ///< seconds
  std::optional<double> fidelity_target;
  std::optional<double> fidelity_instantaneous;
  std::optional<double> entropy;
  Complex a;
  double norm;
  double lambda;
};

struct TraceTargets {
  std::optional<StateVector> target;
  /// |n(lambda)> for the fidelity_instantaneous column.
  std::function<StateVector(double lambda)> instantaneous;
  /// Expected state at checkpoint k (1-based).
  std::function<StateVector(int k)> checkpoint;
};

/// Collects trace rows and checkpoint fidelities from run observers. Samples
/// at an already recorded time replace the previous row, so instantaneous
/// segments leave one row holding their combined effect.
class TraceRecorder {
 public:
  explicit TraceRecorder(TraceTargets targets = {});

  void record(const Sample& s);
  Observer observer() {
    return [this](const Sample& s) { record(s); };
  }

  const std::vector<TraceRow>& rows() const { return rows_; }
  const std::vector<double>& checkpoint_fidelities() const { return checkpoint_fidelities_; }
  double min_checkpoint_fidelity() const;

  /// Header t_us,fidelity_target,fidelity_instantaneous,entropy,re_a,im_a,norm,lambda;
  /// absent quantities are empty fields.
  void write_csv(std::ostream& os) const;

 private:
  TraceTargets targets_;
  std::vector<TraceRow> rows_;
  std::vector<double> checkpoint_fidelities_;
  std::optional<double> cached_lambda_;
  std::optional<StateVector> cached_state_;
};

/// Runs fn(0..n-1) on up to hardware_concurrency threads. Results written by
/// index are independent of scheduling; the first exception is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

struct ScanCell {
  double delta_lambda = 0.0;
  double delta_omega = 0.0;
  int n_pulses = 0;
  double fidelity = 0.0;
  bool converged = false;
};

struct ScanResult {
  double theta = 0.0;
  double omega_c = 0.0;
  int dim = 0;
  std::vector<ScanCell> cells;

  /// delta_lambda,delta_omega,n_pulses,fidelity,converged
  void write_csv(std::ostream& os) const;
  const ScanCell& at(double delta_lambda, double delta_omega, int n_pulses) const;
};

struct BosonScanSpec {
  double theta = 2.0;
  double omega_c = 1.0;
  int dim = 64;
  std::vector<int> n_pulses;
  std::vector<Miscalibration> errors;
  /// Qubit-boson cat protocol (true) or the single-mode coherent protocol.
  bool hybrid = true;
};

/// A cell is converged when the run raised nothing and the final state keeps
/// less than 1e-10 of its weight on the top dim/10 levels.
ScanResult robustness_scan_boson(const BosonScanSpec& spec);

/// (delta, 0) and (0, delta) for every delta, zero counted once, in order.
std::vector<Miscalibration> cross_grid(const std::vector<double>& deltas);

struct QubitScanCell {
  double delta = 0.0;
  int n_pulses = 0;
  double fidelity = 0.0;
  bool converged = false;
};

struct QubitScanResult {
  double lambda = 0.0;
  int dim = 0;
  std::vector<QubitScanCell> cells;

  /// delta_qubit,n_pulses,fidelity,converged
  void write_csv(std::ostream& os) const;
  const QubitScanCell& at(double delta, int n_pulses) const;
};

struct QubitScanSpec {
  double lambda = 0.05;
  double omega_c = 1.0;
  double Omega = 1.0;
  int dim = 96;
  std::vector<int> n_pulses;
  std::vector<double> deltas;
  bool coupling_during_flip = true;
  bool alternate_ctrl_sign = true;
};

QubitScanResult robustness_scan_qubit(const QubitScanSpec& spec);

/// Final fidelity of the amplified protocol against the cat with Theta = 2 N lambda.
double amplified_fidelity(const FockSpace& space, const AmplifiedOptions& options);

struct AuditReport {
  int dim = 0;
  int dim_doubled = 0;
  double fidelity = 0.0;
  double fidelity_doubled = 0.0;
  double delta = 0.0;
  bool passed = false;
};

/// Repeats run(dim) at 2 dim; passes iff |delta fidelity| < tolerance.
AuditReport convergence_audit(const std::function<double(int dim)>& run, int dim, double tolerance = 1e-6);

}  // namespace stam

#endif  // STAM_ANALYSIS_HPP_
