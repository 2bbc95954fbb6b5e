#ifndef STAM_HAMILTONIANS_HPP_
#define STAM_HAMILTONIANS_HPP_

#include "stam/fock.hpp"

#include <vector>

namespace stam {

/// Order J and strength epsilon of the generator G_J = i[eps a^dag^J - eps^* a^J].
struct MultiSqueezeSpec {
  int J = 1;
  Complex epsilon{1.0, 0.0};

  double r() const { return std::abs(epsilon); }
  double theta() const { return std::arg(epsilon); }
};

/// Qubit-boson coupling parameters. sign is the (-1)^k flip state; Omega is the
/// qubit Rabi angular frequency and delta its relative amplitude error.
struct HybridSpec {
  double lambda = 0.0;
  double omega_c = 1.0;
  int sign = 1;
  double Omega = 1.0;
  double delta = 0.0;
};

BandedOperator free_hamiltonian(const FockSpace& space);

BandedOperator generator_G(const FockSpace& space, const MultiSqueezeSpec& spec);

/// <n|G_J|m>: i eps sqrt((n)!/(n-J)!) for n = m + J, its conjugate for
/// m = n + J, zero otherwise. Log-gamma keeps large levels finite.
Complex coupling_g(int n, int m, const MultiSqueezeSpec& spec);

enum class Group { B, R };

/// Two-colouring of the coupling graph: along each chain r, r+J, r+2J, ...
/// even positions are B and odd positions R.
std::vector<Group> bipartition(int J, int dim);

struct GeneralHamiltonian {
  BandedOperator h;
  /// Largest |H(i, j)| in units of omega_c for i < dim and j >= dim + padding/2
  /// in the padded space: coupling that should not exist if the padding
  /// absorbed the truncation error.
  double contamination;
  int padding;
};

/// Default padding max(4J, dim/4).
int default_padding(int J, int dim);

/// e^{-iG lambda} H e^{iG lambda} by dense conjugation on dim + padding levels,
/// cropped to dim and made exactly Hermitian. Entries below 1e-12 of the largest
/// are dropped when choosing the bandwidth. Throws TruncationError when the
/// contamination exceeds max_contamination. padding < 0 selects the default.
GeneralHamiltonian H_J_general(const FockSpace& space, const MultiSqueezeSpec& spec, double lambda,
                               int padding = -1, double max_contamination = 1e-8);

/// omega_c a^dag a - lambda omega_c (eps a^dag + eps^* a) + omega_c |lambda eps|^2.
BandedOperator H_1_explicit(const FockSpace& space, Complex epsilon, double lambda);

/// omega_c [a^dag a cosh^2 + a a^dag sinh^2 - (a^2 e^{-i theta} + h.c.) sinh cosh] at
/// argument 2 lambda r. Matrix elements are the untruncated ones, so
/// (a a^dag)_{nn} = n + 1 on every level including the top one.
BandedOperator H_2_explicit(const FockSpace& space, Complex epsilon, double lambda);

/// H_J(lambda): closed forms for J = 1, 2 and padded conjugation otherwise.
BandedOperator multi_squeeze_hamiltonian(const FockSpace& space, const MultiSqueezeSpec& spec,
                                         double lambda, int padding = -1);

/// omega_c a^dag a (x) I - sign lambda omega_c (a^dag + a) (x) sigma_x on
/// qubit (x) Fock; uses spec.omega_c, not the space's frequency.
BandedOperator hybrid_hamiltonian(const FockSpace& space, const HybridSpec& spec);

/// (-1)^k (1 + delta) (Omega/2) sigma_z (x) I, sigma_z = +1 on |e>.
BandedOperator qubit_control_hamiltonian(const FockSpace& space, const HybridSpec& spec, int k);

}  // namespace stam

#endif  // STAM_HAMILTONIANS_HPP_
