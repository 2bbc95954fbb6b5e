#ifndef STAM_EXPM_HPP_
#define STAM_EXPM_HPP_

#include "stam/fock.hpp"

namespace stam {

struct KrylovOptions {
  /// Error budget for the whole call, in state norm.
  double tolerance = 1e-12;
  int min_subspace = 4;
  int max_subspace = 30;
  long max_steps = 50'000'000;
  /// Gram-Schmidt against the whole basis on every iteration.
  bool full_reorthogonalization = false;
};

struct KrylovStats {
  long steps = 0;
  long matvecs = 0;
  double error_estimate = 0.0;
};

/// e^{-iHt} psi for Hermitian H by restarted Lanczos with adaptive subspace
/// size and step splitting. Throws ConvergenceError when max_steps is hit.
StateVector expm_action(const BandedOperator& h, double t, const StateVector& psi,
                        const KrylovOptions& options = {}, KrylovStats* stats = nullptr);

/// exp(M) for a dense matrix by scaling and squaring; rows limited to 4096.
Matrix expm_dense(const Matrix& m);

/// exp(-iHt) from a dense Hermitian H.
Matrix propagator_dense(const BandedOperator& h, double t);

}  // namespace stam

#endif  // STAM_EXPM_HPP_
