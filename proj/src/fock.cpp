#include "stam/fock.hpp"

#include "stam/format.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

namespace stam {

FockSpace::FockSpace(int dim, double omega_c) : dim_(dim), omega_c_(omega_c) {
  if (dim < 2) throw std::invalid_argument("FockSpace: dim must be >= 2, got " + std::to_string(dim));
  if (!(omega_c > 0.0) || !std::isfinite(omega_c))
    throw std::invalid_argument("FockSpace: omega_c must be positive and finite");
}

FockSpace make_space(int dim, double omega_c) { return FockSpace(dim, omega_c); }

StateVector::StateVector(FockSpace space, int qubit_levels, Vector amplitudes)
    : space_(space), qubit_levels_(qubit_levels), amplitudes_(std::move(amplitudes)) {
  if (qubit_levels != 1 && qubit_levels != 2)
    throw std::invalid_argument("StateVector: qubit_levels must be 1 or 2");
  if (amplitudes_.size() != Eigen::Index(qubit_levels) * space_.dim())
    throw std::invalid_argument("StateVector: amplitude count does not match qubit_levels * dim");
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("StateVector: cannot normalize the zero vector");
  return StateVector(space_, qubit_levels_, amplitudes_ / n);
}

// ---------------------------------------------------------------------------

BandedOperator::BandedOperator(FockSpace space, int qubit_levels, int bandwidth)
    : space_(space), qubit_levels_(qubit_levels), bandwidth_(bandwidth) {
  if (qubit_levels != 1 && qubit_levels != 2)
    throw std::invalid_argument("BandedOperator: qubit_levels must be 1 or 2");
  if (bandwidth < 0 || bandwidth > space.dim() - 1)
    throw std::invalid_argument("BandedOperator: bandwidth must lie in [0, dim-1]");
  blocks_.assign(std::size_t(qubit_levels) * qubit_levels,
                 Eigen::MatrixXcd::Zero(space.dim(), 2 * bandwidth + 1));
}

BandedOperator BandedOperator::build(FockSpace space, int qubit_levels, int bandwidth,
                                     const EntryFn& entry) {
  BandedOperator op(space, qubit_levels, bandwidth);
  const int d = space.dim();
  for (int qr = 0; qr < qubit_levels; ++qr)
    for (int qc = 0; qc < qubit_levels; ++qc) {
      auto& b = op.block(qr, qc);
      for (int k = -bandwidth; k <= bandwidth; ++k)
        for (int n = std::max(0, -k); n < std::min(d, d - k); ++n)
          b(n, bandwidth + k) = entry(qr * d + n, qc * d + n + k);
    }
  return op;
}

BandedOperator BandedOperator::build_hermitian(FockSpace space, int qubit_levels, int bandwidth,
                                               const EntryFn& upper) {
  BandedOperator op(space, qubit_levels, bandwidth);
  const int d = space.dim();
  for (int qr = 0; qr < qubit_levels; ++qr)
    for (int qc = qr; qc < qubit_levels; ++qc) {
      auto& b = op.block(qr, qc);
      const int kmin = (qr == qc) ? 0 : -bandwidth;
      for (int k = kmin; k <= bandwidth; ++k)
        for (int n = std::max(0, -k); n < std::min(d, d - k); ++n)
          b(n, bandwidth + k) = upper(qr * d + n, qc * d + n + k);
    }
  op.hermitian_ = true;
  op.mirror_upper();
  return op;
}

BandedOperator BandedOperator::from_dense_hermitian(FockSpace space, const Matrix& m, int bandwidth) {
  if (m.rows() != space.dim() || m.cols() != space.dim())
    throw std::invalid_argument("from_dense_hermitian: matrix size does not match the space");
  const Matrix sym = (m + m.adjoint()) * 0.5;
  return build_hermitian(space, 1, bandwidth, [&](int r, int c) { return sym(r, c); });
}

BandedOperator BandedOperator::kron_qubit(const Eigen::Matrix2cd& qubit, const BandedOperator& boson) {
  if (boson.qubit_levels_ != 1) throw std::invalid_argument("kron_qubit: boson operator expected");
  BandedOperator op(boson.space_, 2, boson.bandwidth_);
  for (int qr = 0; qr < 2; ++qr)
    for (int qc = 0; qc < 2; ++qc) op.block(qr, qc) = qubit(qr, qc) * boson.block(0, 0);
  op.hermitian_ = boson.hermitian_ && qubit.isApprox(qubit.adjoint(), 0.0);
  if (op.hermitian_) op.mirror_upper();
  return op;
}

void BandedOperator::mirror_upper() {
  const int d = dim();
  const int bw = bandwidth_;
  for (int qr = 0; qr < qubit_levels_; ++qr)
    for (int qc = qr; qc < qubit_levels_; ++qc) {
      const auto& up = block(qr, qc);
      auto& low = block(qc, qr);
      if (qr == qc) {
        auto& diag = block(qr, qr);
        for (int n = 0; n < d; ++n) diag(n, bw) = Complex(diag(n, bw).real(), 0.0);
      }
      const int kmin = (qr == qc) ? 1 : -bw;
      for (int k = kmin; k <= bw; ++k)
        for (int n = std::max(0, -k); n < std::min(d, d - k); ++n)
          low(n + k, bw - k) = std::conj(up(n, bw + k));
    }
}

BandedOperator BandedOperator::widened(int bandwidth) const {
  if (bandwidth == bandwidth_) return *this;
  BandedOperator op(space_, qubit_levels_, bandwidth);
  op.hermitian_ = hermitian_;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    op.blocks_[i].middleCols(bandwidth - bandwidth_, 2 * bandwidth_ + 1) = blocks_[i];
  return op;
}

Complex BandedOperator::operator()(int row, int col) const {
  const int d = dim();
  const int qr = row / d, n = row % d, qc = col / d, m = col % d;
  const int k = m - n;
  if (std::abs(k) > bandwidth_) return {0.0, 0.0};
  return block(qr, qc)(n, bandwidth_ + k);
}

void BandedOperator::apply(const Vector& x, Vector& y) const {
  if (x.size() != size()) throw std::invalid_argument("BandedOperator::apply: size mismatch");
  const Eigen::Index d = dim();
  y.setZero(size());
  // Explicit real arithmetic: std::complex products take the slow
  // NaN-recovering path without -ffast-math.
  const double* xs = reinterpret_cast<const double*>(x.data());
  double* ys = reinterpret_cast<double*>(y.data());
  for (int qr = 0; qr < qubit_levels_; ++qr)
    for (int qc = 0; qc < qubit_levels_; ++qc) {
      const auto& b = block(qr, qc);
      for (int k = -bandwidth_; k <= bandwidth_; ++k) {
        const Eigen::Index i0 = std::max<Eigen::Index>(0, -k);
        const Eigen::Index i1 = std::min<Eigen::Index>(d, d - k);
        const double* bs = reinterpret_cast<const double*>(b.col(bandwidth_ + k).data());
        const double* xk = xs + 2 * (qc * d + k);
        double* yq = ys + 2 * qr * d;
        for (Eigen::Index i = i0; i < i1; ++i) {
          const double br = bs[2 * i], bi = bs[2 * i + 1];
          const double xr = xk[2 * i], xi = xk[2 * i + 1];
          yq[2 * i] += br * xr - bi * xi;
          yq[2 * i + 1] += br * xi + bi * xr;
        }
      }
    }
}

Vector BandedOperator::apply(const Vector& x) const {
  Vector y;
  apply(x, y);
  return y;
}

StateVector BandedOperator::apply(const StateVector& psi) const {
  if (psi.dim() != dim() || psi.qubit_levels() != qubit_levels_)
    throw std::invalid_argument("BandedOperator::apply: state and operator live on different spaces");
  return StateVector(psi.space(), qubit_levels_, apply(psi.amplitudes()));
}

double BandedOperator::norm_bound() const {
  const int d = dim();
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(size());
  for (int qr = 0; qr < qubit_levels_; ++qr)
    for (int qc = 0; qc < qubit_levels_; ++qc)
      rows.segment(qr * d, d) += block(qr, qc).cwiseAbs().rowwise().sum();
  return rows.maxCoeff();
}

int BandedOperator::stride() const {
  int g = 0;
  for (const auto& b : blocks_)
    for (int k = 1; k <= bandwidth_; ++k)
      if (!b.col(bandwidth_ + k).isZero(0.0) || !b.col(bandwidth_ - k).isZero(0.0)) g = std::gcd(g, k);
  return g;
}

BandedOperator BandedOperator::chain(int r, int s) const {
  const int d = dim();
  if (s < 1 || r < 0 || r >= s) throw std::invalid_argument("BandedOperator::chain: need 0 <= r < s");
  const int st = stride();
  if (st != 0 && st % s != 0) throw std::invalid_argument("BandedOperator::chain: s does not divide the stride");
  const int len = (d - r + s - 1) / s;
  const FockSpace sub(len, space_.omega_c());
  auto map = [&](int idx) { return (idx / len) * d + r + s * (idx % len); };
  auto entry = [&](int row, int col) { return (*this)(map(row), map(col)); };
  const int bw = std::min(bandwidth_ / s, len - 1);
  BandedOperator op = hermitian_ ? build_hermitian(sub, qubit_levels_, bw, entry)
                                 : build(sub, qubit_levels_, bw, entry);
  op.hermitian_ = hermitian_;
  return op;
}

Vector BandedOperator::diagonal() const {
  const int d = dim();
  Vector v(size());
  for (int q = 0; q < qubit_levels_; ++q) v.segment(q * d, d) = block(q, q).col(bandwidth_);
  return v;
}

bool BandedOperator::is_diagonal() const {
  for (int qr = 0; qr < qubit_levels_; ++qr)
    for (int qc = 0; qc < qubit_levels_; ++qc) {
      const auto& b = block(qr, qc);
      for (int k = -bandwidth_; k <= bandwidth_; ++k)
        if ((qr != qc || k != 0) && !b.col(bandwidth_ + k).isZero(0.0)) return false;
    }
  return true;
}

Matrix BandedOperator::to_dense() const {
  const int d = dim();
  Matrix m = Matrix::Zero(size(), size());
  for (int qr = 0; qr < qubit_levels_; ++qr)
    for (int qc = 0; qc < qubit_levels_; ++qc) {
      const auto& b = block(qr, qc);
      for (int k = -bandwidth_; k <= bandwidth_; ++k)
        for (int n = std::max(0, -k); n < std::min(d, d - k); ++n)
          m(qr * d + n, qc * d + n + k) = b(n, bandwidth_ + k);
    }
  return m;
}

BandedOperator BandedOperator::adjoint() const {
  BandedOperator op = build(space_, qubit_levels_, bandwidth_,
                            [this](int r, int c) { return std::conj((*this)(c, r)); });
  op.hermitian_ = hermitian_;
  return op;
}

BandedOperator BandedOperator::operator+(const BandedOperator& other) const {
  if (other.dim() != dim() || other.qubit_levels_ != qubit_levels_)
    throw std::invalid_argument("BandedOperator: sum of operators on different spaces");
  const int bw = std::max(bandwidth_, other.bandwidth_);
  BandedOperator lhs = widened(bw);
  const BandedOperator rhs = other.widened(bw);
  for (std::size_t i = 0; i < lhs.blocks_.size(); ++i) lhs.blocks_[i] += rhs.blocks_[i];
  lhs.hermitian_ = hermitian_ && other.hermitian_;
  if (lhs.hermitian_) lhs.mirror_upper();
  return lhs;
}

BandedOperator BandedOperator::operator-(const BandedOperator& other) const { return *this + other * -1.0; }

BandedOperator BandedOperator::operator*(double s) const {
  BandedOperator op = *this;
  for (auto& b : op.blocks_) b *= s;
  if (op.hermitian_) op.mirror_upper();
  return op;
}

BandedOperator BandedOperator::operator*(Complex s) const {
  if (s.imag() == 0.0) return *this * s.real();
  BandedOperator op = *this;
  for (auto& b : op.blocks_) b *= s;
  op.hermitian_ = false;
  return op;
}

void BandedOperator::write_triplets(std::ostream& os) const {
  os << "bandedop dim=" << dim() << " qubit_levels=" << qubit_levels_ << " bandwidth=" << bandwidth_
     << '\n';
  const Eigen::Index n = size();
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const Complex v = (*this)(int(r), int(c));
      if (v != Complex(0.0, 0.0))
        os << r << ' ' << c << ' ' << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
    }
}

// ---------------------------------------------------------------------------

DensityMatrix2::DensityMatrix2(const Eigen::Matrix2cd& entries) : entries_(entries) {
  if (std::abs(trace() - 1.0) > 1e-10)
    throw std::invalid_argument("DensityMatrix2: trace deviates from 1 by more than 1e-10");
  const Eigen::Vector2d ev = eigenvalues();
  if (ev(0) < -1e-10 || ev(1) > 1.0 + 1e-10)
    throw std::invalid_argument("DensityMatrix2: eigenvalues outside [0, 1]");
}

Eigen::Vector2d DensityMatrix2::eigenvalues() const {
  const Eigen::Matrix2cd h = (entries_ + entries_.adjoint()) * 0.5;
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

// ---------------------------------------------------------------------------

LadderOps ladder_ops(const FockSpace& space) {
  auto a = BandedOperator::build(space, 1, 1, [](int r, int c) {
    return c == r + 1 ? Complex(std::sqrt(double(c)), 0.0) : Complex(0.0, 0.0);
  });
  auto n_op = BandedOperator::build_hermitian(space, 1, 0, [](int r, int) { return Complex(r, 0.0); });
  auto a_dag = a.adjoint();
  return {std::move(a), std::move(a_dag), std::move(n_op)};
}

StateVector fock_state(const FockSpace& space, int n) {
  if (n < 0 || n >= space.dim())
    throw std::out_of_range("fock_state: level " + std::to_string(n) + " outside [0, " +
                            std::to_string(space.dim() - 1) + "]");
  Vector v = Vector::Zero(space.dim());
  v(n) = 1.0;
  return StateVector(space, 1, std::move(v));
}

CoherentResult coherent_state_report(const FockSpace& space, Complex alpha) {
  const double mod = std::abs(alpha);
  const int d = space.dim();
  if (!(mod * mod + 6.0 * mod < d))
    throw std::invalid_argument("coherent_state: dim " + std::to_string(d) +
                                " is below |alpha|^2 + 6|alpha| = " + std::to_string(mod * mod + 6.0 * mod));
  Vector v = Vector::Zero(d);
  if (mod == 0.0) {
    v(0) = 1.0;
  } else {
    const double log_mod = std::log(mod);
    const double phase = std::arg(alpha);
    for (int n = 0; n < d; ++n) {
      const double log_amp = -0.5 * mod * mod + n * log_mod - 0.5 * std::lgamma(n + 1.0);
      v(n) = std::polar(std::exp(log_amp), n * phase);
    }
  }
  const double leakage = std::max(0.0, 1.0 - v.squaredNorm());
  if (leakage > 1e-4)
    throw TruncationError("coherent_state: truncation leakage " + format_double(leakage) + " exceeds 1e-4",
                          leakage);
  if (leakage > 1e-10)
    std::clog << "warning: coherent_state leakage " << leakage << " at dim " << d << '\n';
  return {StateVector(space, 1, v / v.norm()), leakage};
}

StateVector coherent_state(const FockSpace& space, Complex alpha) {
  return coherent_state_report(space, alpha).state;
}

static void require_compatible(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim() || psi.qubit_levels() != phi.qubit_levels())
    throw std::invalid_argument("states live on different spaces");
}

Complex inner(const StateVector& psi, const StateVector& phi) {
  require_compatible(psi, phi);
  return psi.amplitudes().dot(phi.amplitudes());
}

double fidelity(const StateVector& psi, const StateVector& phi) { return std::norm(inner(psi, phi)); }

StateVector tensor_qubit(const Eigen::Vector2cd& qubit, const StateVector& boson) {
  if (boson.qubit_levels() != 1) throw std::invalid_argument("tensor_qubit: boson-only state expected");
  if (std::abs(qubit.norm() - 1.0) > 1e-10 || std::abs(boson.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("tensor_qubit: inputs must be normalized");
  const int d = boson.dim();
  Vector v(2 * d);
  v.head(d) = qubit(0) * boson.amplitudes();
  v.tail(d) = qubit(1) * boson.amplitudes();
  return StateVector(boson.space(), 2, std::move(v));
}

DensityMatrix2 partial_trace_qubit(const StateVector& psi) {
  if (psi.qubit_levels() != 2) throw std::invalid_argument("partial_trace_qubit: qubit (x) boson state expected");
  Eigen::Matrix2cd rho;
  for (int q = 0; q < 2; ++q)
    for (int qp = 0; qp < 2; ++qp) rho(q, qp) = psi.block(qp).dot(psi.block(q));
  return DensityMatrix2(rho);
}

double edge_weight(const StateVector& psi, int levels) {
  const int d = psi.dim();
  levels = std::clamp(levels, 0, d);
  double w = 0.0;
  for (int q = 0; q < psi.qubit_levels(); ++q) w += psi.block(q).tail(levels).squaredNorm();
  return w;
}

Complex expect_a(const StateVector& psi) {
  const int d = psi.dim();
  Complex acc = 0.0;
  for (int q = 0; q < psi.qubit_levels(); ++q) {
    const auto b = psi.block(q);
    for (int n = 1; n < d; ++n) acc += std::conj(b(n - 1)) * std::sqrt(double(n)) * b(n);
  }
  return acc;
}

double phase_aligned_distance(const Matrix& a, const Matrix& b, Eigen::Index interior) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("phase_aligned_distance: shape mismatch");
  interior = std::min({interior, a.rows(), a.cols()});
  const Matrix ai = a.topLeftCorner(interior, interior);
  const Matrix bi = b.topLeftCorner(interior, interior);
  Eigen::Index r = 0, c = 0;
  bi.cwiseAbs().maxCoeff(&r, &c);
  Complex phase = 1.0;
  if (std::abs(bi(r, c)) > 0.0 && std::abs(ai(r, c)) > 0.0) {
    const Complex ratio = ai(r, c) / bi(r, c);
    phase = ratio / std::abs(ratio);
  }
  const Matrix diff = ai - phase * bi;
  return Eigen::BDCSVD<Matrix>(diff).singularValues()(0);
}

void write_state(std::ostream& os, const StateVector& psi) {
  os << "fockstate dim=" << psi.dim() << " qubit_levels=" << psi.qubit_levels() << '\n';
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const Complex v = psi.amplitudes()(i);
    os << i << ' ' << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
  }
}

StateVector read_state(std::istream& is, double omega_c) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_state: empty input");
  int dim = 0, levels = 0;
  if (std::sscanf(line.c_str(), "fockstate dim=%d qubit_levels=%d", &dim, &levels) != 2)
    throw std::invalid_argument("read_state: malformed header '" + line + "'");
  const FockSpace space(dim, omega_c);
  Vector v = Vector::Zero(Eigen::Index(dim) * levels);
  Eigen::Index idx;
  std::string re, im;
  while (is >> idx >> re >> im) {
    if (idx < 0 || idx >= v.size()) throw std::invalid_argument("read_state: index out of range");
    v(idx) = Complex(std::stod(re), std::stod(im));
  }
  return StateVector(space, levels, std::move(v));
}

}  // namespace stam
