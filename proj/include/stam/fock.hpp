#ifndef STAM_FOCK_HPP_
#define STAM_FOCK_HPP_

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace stam {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Raised when an approximation does not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Raised when a state or operator does not fit in the retained Fock levels.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double leakage)
      : std::runtime_error(what), leakage_(leakage) {}
  double leakage() const { return leakage_; }

 private:
  double leakage_;
};

/// Retained Fock levels 0..dim-1 of one bosonic mode with angular frequency omega_c.
class FockSpace {
 public:
  FockSpace(int dim, double omega_c);

  int dim() const { return dim_; }
  double omega_c() const { return omega_c_; }

  /// Same levels with a different mode frequency.
  FockSpace with_omega(double omega_c) const { return FockSpace(dim_, omega_c); }

 private:
  int dim_;
  double omega_c_;
};

FockSpace make_space(int dim, double omega_c);

/// Amplitudes over the Fock basis (qubit_levels = 1) or over qubit (x) Fock
/// (qubit_levels = 2). Product index is q * dim + n, q = 0 is |g>, q = 1 is |e>.
class StateVector {
 public:
  StateVector(FockSpace space, int qubit_levels, Vector amplitudes);

  const FockSpace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  int qubit_levels() const { return qubit_levels_; }
  Eigen::Index size() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }

  Complex at(int q, int n) const { return amplitudes_(q * space_.dim() + n); }
  auto block(int q) const { return amplitudes_.segment(q * space_.dim(), space_.dim()); }

  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;

 private:
  FockSpace space_;
  int qubit_levels_;
  Vector amplitudes_;
};

/// Hermitian-or-general operator on the Fock space or qubit (x) Fock, stored as
/// a qubit_levels x qubit_levels grid of banded Fock blocks. Diagonal k of a
/// block (k = col - row, |k| <= bandwidth) is column bandwidth + k of that
/// block's storage, indexed by row.
class BandedOperator {
 public:
  using EntryFn = std::function<Complex(int row, int col)>;

  /// Fills every in-band entry of every block from entry(row, col) with
  /// full product-space indices.
  static BandedOperator build(FockSpace space, int qubit_levels, int bandwidth, const EntryFn& entry);

  /// Reads only row <= col entries; the lower triangle is the conjugate mirror
  /// and diagonal imaginary parts are dropped, so the result is exactly Hermitian.
  static BandedOperator build_hermitian(FockSpace space, int qubit_levels, int bandwidth,
                                        const EntryFn& upper);

  /// Keeps the band up to `bandwidth` of a dense Fock-space matrix after exact
  /// symmetrization (M + M^H) / 2.
  static BandedOperator from_dense_hermitian(FockSpace space, const Matrix& m, int bandwidth);

  /// q (x) boson for a 2x2 qubit operator q and a boson-only operator.
  static BandedOperator kron_qubit(const Eigen::Matrix2cd& qubit, const BandedOperator& boson);

  const FockSpace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  int qubit_levels() const { return qubit_levels_; }
  int bandwidth() const { return bandwidth_; }
  bool hermitian() const { return hermitian_; }
  Eigen::Index size() const { return Eigen::Index(qubit_levels_) * space_.dim(); }

  Complex operator()(int row, int col) const;

  void apply(const Vector& x, Vector& y) const;
  Vector apply(const Vector& x) const;
  StateVector apply(const StateVector& psi) const;

  /// Upper bound on the spectral radius (maximum absolute row sum).
  double norm_bound() const;

  /// gcd of the offsets of all nonzero off-diagonals (0 for a diagonal
  /// operator). With stride s the levels n = r mod s never couple to other
  /// residues, the same in every qubit block.
  int stride() const;

  /// Restriction to levels r, r + s, r + 2s, ... of every qubit block, as an
  /// operator on that chain. Requires s to divide stride() and a chain of at
  /// least two levels.
  BandedOperator chain(int r, int s) const;

  /// Diagonal entries over the product space.
  Vector diagonal() const;
  bool is_diagonal() const;

  Matrix to_dense() const;
  BandedOperator adjoint() const;

  BandedOperator operator+(const BandedOperator& other) const;
  BandedOperator operator-(const BandedOperator& other) const;
  BandedOperator operator*(double s) const;
  BandedOperator operator*(Complex s) const;
  friend BandedOperator operator*(double s, const BandedOperator& op) { return op * s; }
  friend BandedOperator operator*(Complex s, const BandedOperator& op) { return op * s; }

  /// Text dump: header line then `row col re im` for every nonzero entry.
  void write_triplets(std::ostream& os) const;

 private:
  BandedOperator(FockSpace space, int qubit_levels, int bandwidth);

  Eigen::MatrixXcd& block(int qr, int qc) { return blocks_[qr * qubit_levels_ + qc]; }
  const Eigen::MatrixXcd& block(int qr, int qc) const { return blocks_[qr * qubit_levels_ + qc]; }
  BandedOperator widened(int bandwidth) const;
  void mirror_upper();

  FockSpace space_;
  int qubit_levels_;
  int bandwidth_;
  bool hermitian_ = false;
  std::vector<Eigen::MatrixXcd> blocks_;
};

/// Reduced 2x2 qubit density matrix.
class DensityMatrix2 {
 public:
  explicit DensityMatrix2(const Eigen::Matrix2cd& entries);

  const Eigen::Matrix2cd& entries() const { return entries_; }
  double trace() const { return entries_.trace().real(); }
  /// Ascending.
  Eigen::Vector2d eigenvalues() const;

 private:
  Eigen::Matrix2cd entries_;
};

struct LadderOps {
  BandedOperator a;
  BandedOperator a_dag;
  BandedOperator n_op;
};

LadderOps ladder_ops(const FockSpace& space);

StateVector fock_state(const FockSpace& space, int n);

struct CoherentResult {
  StateVector state;
  double leakage;  ///< 1 - sum |c_n|^2 before renormalization
};

/// Truncated coherent state with its leakage report. Requires
/// |alpha|^2 + 6|alpha| < dim; warns above 1e-10 leakage, throws above 1e-4.
CoherentResult coherent_state_report(const FockSpace& space, Complex alpha);
StateVector coherent_state(const FockSpace& space, Complex alpha);

Complex inner(const StateVector& psi, const StateVector& phi);
double fidelity(const StateVector& psi, const StateVector& phi);

StateVector tensor_qubit(const Eigen::Vector2cd& qubit, const StateVector& boson);
DensityMatrix2 partial_trace_qubit(const StateVector& psi);

/// Weight on the top `levels` Fock levels, summed over qubit blocks.
double edge_weight(const StateVector& psi, int levels);

/// <a> summed over qubit blocks.
Complex expect_a(const StateVector& psi);

/// Spectral norm of A - e^{i phi} B restricted to the leading `interior`
/// rows and columns; phi aligns the largest-magnitude element of B with A.
double phase_aligned_distance(const Matrix& a, const Matrix& b, Eigen::Index interior);

void write_state(std::ostream& os, const StateVector& psi);
StateVector read_state(std::istream& is, double omega_c = 1.0);

}  // namespace stam

#endif  // STAM_FOCK_HPP_
