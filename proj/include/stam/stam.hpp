#ifndef STAM_STAM_HPP_
#define STAM_STAM_HPP_

#include "stam/evolution.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stam {

/// Sampling points lambda_k = Theta (2k - 1) / (2N), checkpoints
/// Theta_k = k Theta / N and pulse length t_p = pi / (J omega_c).
struct StamPlan {
  int J = 1;
  Complex epsilon{1.0, 0.0};
  double theta = 0.0;
  int n_pulses = 1;
  double omega_c = 1.0;
  std::vector<double> lambdas;      ///< k = 1..N
  std::vector<double> checkpoints;  ///< k = 0..N
  double t_p = 0.0;

  MultiSqueezeSpec spec() const { return {J, epsilon}; }
};

StamPlan make_plan(int J, Complex epsilon, double theta, int n_pulses, double omega_c);

/// Plan as a JSON object: J, epsilon_re, epsilon_im, theta, n_pulses,
/// omega_c, lambdas, t_p.
std::string plan_json(const StamPlan& plan);

struct Rational {
  long long num = 0;
  long long den = 1;
};

/// int_0^{Theta_k} F(lambda) dlambda with F = (-1)^j on [lambda_j, lambda_{j+1}),
/// lambda_0 = 0, lambda_{N+1} = Theta, in exact integer arithmetic. The result
/// is in units of Theta.
Rational sign_integral(int n_pulses, int k);

/// True when sign_integral vanishes at every checkpoint k = 0..N.
bool sign_cancellation_exact(int n_pulses);

/// |n_J(lambda)> = e^{-iG lambda}|n>; closed form for J = 1, n = 0.
StateVector adiabatic_state(const FockSpace& space, const MultiSqueezeSpec& spec, double lambda, int n = 0);

/// Static miscalibration: lambda_k -> (1 + delta_lambda) lambda_k and
/// omega_c -> (1 + delta_omega) omega_c in the Hamiltonian; t_p keeps the
/// ideal frequency.
struct Miscalibration {
  double delta_lambda = 0.0;
  double delta_omega = 0.0;
};

/// N pulses H_J(lambda_k) for t_p (or composite triples), a checkpoint after
/// each. The space supplies the dimension; frequencies come from the plan.
PulseSequence build_boson_sequence(const StamPlan& plan, const FockSpace& space, bool use_composite = false,
                                   const Miscalibration& error = {}, int padding = -1);

/// N hybrid pulses H(lambda_k, sign = +1) for t_p = pi / omega_c on qubit (x) Fock.
PulseSequence build_hybrid_sequence(double theta, int n_pulses, const FockSpace& space,
                                    const Miscalibration& error = {});

/// (|Theta>|+> - |-Theta>|->)/sqrt(2), |+-> = (|e> +- |g>)/sqrt(2).
StateVector hybrid_cat(const FockSpace& space, double theta);

struct AmplifiedOptions {
  double lambda = 0.05;
  int n_pulses = 1;
  double omega_c = 1.0;
  double Omega = 1.0;
  double delta = 0.0;
  bool coupling_during_flip = true;
  /// H_ctrl sign (-1)^k on the k-th flip; false keeps it fixed at +1.
  bool alternate_ctrl_sign = true;
  /// Replace the finite qubit pulses by ideal instantaneous sigma_z flips
  /// (-i sigma_z, unit duration, clock not advanced).
  bool instantaneous_flip = false;
  /// With coupling during flips, shorten each bosonic pulse that precedes a
  /// flip by pi / Omega so pulse plus flip span exactly pi / omega_c.
  bool synchronized = true;
};

/// Laboratory-frame amplified cat: N bosonic pulses H(lambda, +1) for
/// pi / omega_c interleaved with N - 1 qubit pi pulses of length pi / Omega.
/// The physical flips swap |+> and |->, which is what reverses the effective
/// coupling sign, so the bosonic Hamiltonian itself never changes sign.
/// Each bosonic pulse closes a checkpoint with amplitude 2k lambda.
PulseSequence build_amplified_sequence(const FockSpace& space, const AmplifiedOptions& options);

struct Decomposition {
  Matrix u_adia;
  Matrix u_err;
  /// Spectral norm of U_err - I on the leading `interior` levels.
  double distance;
};

/// U_adia = e^{-iG lambda} diag(e^{-i n omega_c t}), U_err = U_adia^dag U.
Decomposition adiabatic_decomposition(const Matrix& u, double lambda_end, double t_elapsed,
                                      const FockSpace& space, const MultiSqueezeSpec& spec,
                                      Eigen::Index interior);

/// W = sum_{n != m} e^{i(phi_n - phi_m)} g_nm |n><m|, phi_n = n omega_c t.
/// W carries no lambda dependence of its own; the argument is kept so call
/// sites read like the path integrand.
Matrix W_operator(double lambda, double t_elapsed, const MultiSqueezeSpec& spec, const FockSpace& space);

/// The common F on connected pairs of W at t_elapsed, if one exists.
std::optional<int> common_sign(double t_elapsed, const MultiSqueezeSpec& spec, const FockSpace& space);

struct PhaseLedger {
  Eigen::VectorXd phases;  ///< phi_n = n omega_c t, radians
  std::vector<Group> groups;
  int J = 1;
};

PhaseLedger phase_ledger(const FockSpace& space, int J, double t_elapsed);

/// Within each coupling chain (levels congruent mod J), e^{i phi_n} divided
/// by the chain's first entry must be constant on B and constant on R.
/// Returns the R/B ratio (+1 or -1) shared by all chains, if any.
std::optional<int> parity_check(const PhaseLedger& ledger, double tol = 1e-9);

}  // namespace stam

#endif  // STAM_STAM_HPP_
