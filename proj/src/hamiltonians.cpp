#include "stam/hamiltonians.hpp"

#include "stam/expm.hpp"
#include "stam/format.hpp"

#include <algorithm>
#include <cmath>

namespace stam {

BandedOperator free_hamiltonian(const FockSpace& space) {
  const double w = space.omega_c();
  return BandedOperator::build_hermitian(space, 1, 0, [w](int n, int) { return Complex(n * w, 0.0); });
}

static void check_order(const FockSpace& space, const MultiSqueezeSpec& spec) {
  if (spec.J < 1) throw std::invalid_argument("MultiSqueezeSpec: J must be >= 1");
  if (spec.J > space.dim() - 1)
    throw std::invalid_argument("generator_G: J = " + std::to_string(spec.J) + " needs dim > J, got dim " +
                                std::to_string(space.dim()));
}

Complex coupling_g(int n, int m, const MultiSqueezeSpec& spec) {
  if (n < 0 || m < 0) throw std::invalid_argument("coupling_g: levels must be non-negative");
  const int J = spec.J;
  if (n == m + J) {
    const double amp = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
    return kI * spec.epsilon * amp;
  }
  if (m == n + J) return std::conj(coupling_g(m, n, spec));
  return {0.0, 0.0};
}

BandedOperator generator_G(const FockSpace& space, const MultiSqueezeSpec& spec) {
  check_order(space, spec);
  return BandedOperator::build_hermitian(space, 1, spec.J,
                                         [&spec](int r, int c) { return coupling_g(r, c, spec); });
}

std::vector<Group> bipartition(int J, int dim) {
  if (J < 1) throw std::invalid_argument("bipartition: J must be >= 1");
  if (dim < 0) throw std::invalid_argument("bipartition: dim must be non-negative");
  std::vector<Group> labels(static_cast<std::size_t>(dim));
  for (int n = 0; n < dim; ++n) labels[n] = ((n / J) % 2 == 0) ? Group::B : Group::R;
  return labels;
}

int default_padding(int J, int dim) { return std::max(4 * J, dim / 4); }

GeneralHamiltonian H_J_general(const FockSpace& space, const MultiSqueezeSpec& spec, double lambda,
                               int padding, double max_contamination) {
  check_order(space, spec);
  const int d = space.dim();
  if (padding < 0) padding = default_padding(spec.J, d);
  if (lambda == 0.0) return {free_hamiltonian(space), 0.0, padding};

  const FockSpace big(d + padding, space.omega_c());
  const Matrix g = generator_G(big, spec).to_dense();
  const Matrix u = expm_dense(Complex(0.0, -lambda) * g);
  Eigen::VectorXcd e(big.dim());
  for (int n = 0; n < big.dim(); ++n) e(n) = n * space.omega_c();
  const Matrix h = u * e.asDiagonal() * u.adjoint();

  double contamination = 0.0;
  const int far = d + padding / 2;
  if (far < big.dim())
    contamination = h.topRightCorner(d, big.dim() - far).cwiseAbs().maxCoeff() / space.omega_c();
  if (contamination > max_contamination)
    throw TruncationError("H_J_general: boundary contamination " + format_double(contamination) +
                              " exceeds " + format_double(max_contamination) + "; increase padding",
                          contamination);

  const Matrix crop = h.topLeftCorner(d, d);
  const double cut = 1e-12 * crop.cwiseAbs().maxCoeff();
  int bw = 0;
  for (int k = d - 1; k > 0 && bw == 0; --k)
    for (int n = 0; n + k < d; ++n)
      if (std::abs(crop(n, n + k)) > cut || std::abs(crop(n + k, n)) > cut) {
        bw = k;
        break;
      }
  return {BandedOperator::from_dense_hermitian(space, crop, bw), contamination, padding};
}

BandedOperator H_1_explicit(const FockSpace& space, Complex epsilon, double lambda) {
  const double w = space.omega_c();
  const double shift = w * std::norm(lambda * epsilon);
  // Upper triangle: <n|a^dag|n+1> = 0, <n|a|n+1> = sqrt(n+1).
  return BandedOperator::build_hermitian(space, 1, 1, [&](int r, int c) -> Complex {
    if (r == c) return r * w + shift;
    return -lambda * w * std::conj(epsilon) * std::sqrt(double(c));
  });
}

BandedOperator H_2_explicit(const FockSpace& space, Complex epsilon, double lambda) {
  const double w = space.omega_c();
  const double x = 2.0 * lambda * std::abs(epsilon);
  const double ch = std::cosh(x), sh = std::sinh(x);
  const Complex phase = std::polar(1.0, -std::arg(epsilon));
  return BandedOperator::build_hermitian(space, 1, 2, [&](int r, int c) -> Complex {
    if (r == c) return w * (r * ch * ch + (r + 1.0) * sh * sh);
    if (c == r + 2) return -w * sh * ch * phase * std::sqrt(double(r + 1) * (r + 2));
    return 0.0;
  });
}

BandedOperator multi_squeeze_hamiltonian(const FockSpace& space, const MultiSqueezeSpec& spec,
                                         double lambda, int padding) {
  check_order(space, spec);
  if (spec.J == 1) return H_1_explicit(space, spec.epsilon, lambda);
  if (spec.J == 2) return H_2_explicit(space, spec.epsilon, lambda);
  return H_J_general(space, spec, lambda, padding).h;
}

static void check_hybrid(const HybridSpec& spec) {
  if (spec.sign != 1 && spec.sign != -1) throw std::invalid_argument("HybridSpec: sign must be +1 or -1");
  if (!(spec.Omega > 0.0)) throw std::invalid_argument("HybridSpec: Omega must be positive");
}

BandedOperator hybrid_hamiltonian(const FockSpace& space, const HybridSpec& spec) {
  check_hybrid(spec);
  const int d = space.dim();
  const double w = spec.omega_c;
  const double c = -spec.sign * spec.lambda * w;
  return BandedOperator::build_hermitian(space, 2, 1, [&](int row, int col) -> Complex {
    const int qr = row / d, n = row % d, qc = col / d, m = col % d;
    if (qr == qc) return n == m ? Complex(n * w, 0.0) : Complex(0.0, 0.0);
    // sigma_x block: (a^dag + a) has sqrt(max(n, m)) on both neighbours.
    if (std::abs(n - m) == 1) return c * std::sqrt(double(std::max(n, m)));
    return 0.0;
  });
}

BandedOperator qubit_control_hamiltonian(const FockSpace& space, const HybridSpec& spec, int k) {
  check_hybrid(spec);
  const double amp = ((k % 2 == 0) ? 1.0 : -1.0) * (1.0 + spec.delta) * 0.5 * spec.Omega;
  const int d = space.dim();
  return BandedOperator::build_hermitian(space, 2, 0, [&](int row, int col) {
    if (row != col) return Complex(0.0, 0.0);
    return Complex(row / d == 1 ? amp : -amp, 0.0);
  });
}

}  // namespace stam
