#include "stam/fock.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace stam;

namespace {

// Poisson amplitudes by running product, independent of the library's lgamma path.
Vector coherent_oracle(int dim, Complex alpha) {
  Vector v(dim);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < dim; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(double(n + 1));
  }
  return v;
}

}  // namespace

TEST_CASE("space validation") {
  CHECK_NOTHROW(FockSpace(700, 2 * kPi * 1e6));
  CHECK_THROWS_AS(FockSpace(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FockSpace(8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(FockSpace(8, -1.0), std::invalid_argument);
}

TEST_CASE("ladder operators at dim 4") {
  const FockSpace sp(4, 1.0);
  const auto ops = ladder_ops(sp);
  const Matrix a = ops.a.to_dense();
  const Matrix ad = ops.a_dag.to_dense();
  CHECK((ad * a - ops.n_op.to_dense()).norm() < 1e-15);
  const Matrix aad = a * ad;
  for (int n = 0; n < 3; ++n) CHECK(aad(n, n).real() == doctest::Approx(n + 1));
  // The truncation shows up only in the top entry of a a^dag.
  CHECK(aad(3, 3).real() == doctest::Approx(0.0));
  CHECK((ops.a.adjoint().to_dense() - ad).norm() == 0.0);
  CHECK(ops.n_op.hermitian());
}

TEST_CASE("fock states") {
  const FockSpace sp(8, 1.0);
  CHECK(fock_state(sp, 0).amplitudes()(0) == Complex(1.0));
  CHECK(fock_state(sp, 7).amplitudes()(7) == Complex(1.0));
  CHECK_THROWS_AS(fock_state(sp, 8), std::out_of_range);
  CHECK_THROWS_AS(fock_state(sp, -1), std::out_of_range);
}

TEST_CASE("coherent states against the Poisson product") {
  const FockSpace sp(64, 1.0);
  for (Complex alpha : {Complex(0.0), Complex(2.0), Complex(-1.5, 0.7), Complex(0.0, 3.0)}) {
    const Vector ref = coherent_oracle(64, alpha);
    CHECK((coherent_state(sp, alpha).amplitudes() - ref / ref.norm()).norm() < 1e-13);
  }
  CHECK(fidelity(coherent_state(sp, 0.0), fock_state(sp, 0)) == doctest::Approx(1.0));
}

TEST_CASE("coherent leakage and refusal") {
  const auto r = coherent_state_report(FockSpace(700, 1.0), 20.0);
  CHECK(r.leakage < 1e-10);
  CHECK_THROWS_AS(coherent_state(FockSpace(32, 1.0), 5.0), std::invalid_argument);
  // |alpha|^2 + 6|alpha| < dim holds but the tail is still heavy.
  CHECK_THROWS_AS(coherent_state(FockSpace(4, 1.0), 0.5), TruncationError);
}

TEST_CASE("overlaps") {
  const FockSpace sp(64, 1.0);
  const auto p = coherent_state(sp, 2.0), m = coherent_state(sp, -2.0);
  CHECK(std::abs(inner(p, m)) == doctest::Approx(std::exp(-8.0)).epsilon(1e-10));
  CHECK(fidelity(p, m) == doctest::Approx(std::exp(-16.0)).epsilon(1e-9));
  CHECK(fidelity(p, p) == doctest::Approx(1.0));
  CHECK(fidelity(fock_state(sp, 0), fock_state(sp, 1)) == 0.0);
  CHECK_THROWS(inner(p, fock_state(FockSpace(32, 1.0), 0)));
}

TEST_CASE("tensor product layout and partial trace") {
  const FockSpace sp(16, 1.0);
  const auto g0 = tensor_qubit(Eigen::Vector2cd(1.0, 0.0), fock_state(sp, 0));
  CHECK(g0.amplitudes()(0) == Complex(1.0));
  CHECK(g0.amplitudes().squaredNorm() == doctest::Approx(1.0));
  const auto e3 = tensor_qubit(Eigen::Vector2cd(0.0, 1.0), fock_state(sp, 3));
  CHECK(e3.amplitudes()(16 + 3) == Complex(1.0));

  const Eigen::Vector2cd q = Eigen::Vector2cd(1.0, Complex(0.0, 1.0)) / std::sqrt(2.0);
  const auto rho = partial_trace_qubit(tensor_qubit(q, coherent_state(sp, 1.0)));
  const auto ev = rho.eigenvalues();
  CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(1.0));

  // (|a>|+> - |-a>|->)/sqrt2 has qubit eigenvalues (1 +- <a|-a>)/2.
  const FockSpace big(64, 1.0);
  const Vector p = coherent_state(big, 2.0).amplitudes(), m = coherent_state(big, -2.0).amplitudes();
  Vector v(128);
  v.head(64) = 0.5 * (p + m);
  v.tail(64) = 0.5 * (p - m);
  const auto cat = StateVector(big, 2, v / v.norm());
  const auto evc = partial_trace_qubit(cat).eigenvalues();
  const double x = std::exp(-8.0);
  CHECK(evc(0) == doctest::Approx((1 - x) / 2).epsilon(1e-12));
  CHECK(evc(1) == doctest::Approx((1 + x) / 2).epsilon(1e-12));
  CHECK_THROWS_AS(partial_trace_qubit(fock_state(big, 0)), std::invalid_argument);
}

TEST_CASE("density matrix validation") {
  Eigen::Matrix2cd bad;
  bad << 0.7, 0.0, 0.0, 0.7;
  CHECK_THROWS_AS(DensityMatrix2{bad}, std::invalid_argument);
}

TEST_CASE("banded operator algebra") {
  const FockSpace sp(12, 1.0);
  auto op = BandedOperator::build_hermitian(sp, 1, 3, [](int r, int c) {
    return Complex(0.1 * r + 0.01 * c, r == c ? 0.0 : 0.3 * (c - r));
  });
  const Matrix d = op.to_dense();
  CHECK((d - d.adjoint()).norm() == 0.0);
  Vector x = Vector::LinSpaced(12, 0.0, 1.0) + kI * Vector::LinSpaced(12, 1.0, -1.0);
  CHECK((op.apply(x) - d * x).norm() < 1e-13);
  CHECK(op.bandwidth() == 3);
  CHECK(op(0, 3) == d(0, 3));
  CHECK(op(0, 5) == Complex(0.0));
  CHECK(((op + op * 2.0).to_dense() - 3.0 * d).norm() < 1e-13);
  CHECK(((op - op).to_dense()).norm() == 0.0);
  CHECK_THROWS(BandedOperator::build(sp, 3, 1, [](int, int) { return Complex(0.0); }));
  CHECK_THROWS(BandedOperator::build(sp, 1, 12, [](int, int) { return Complex(0.0); }));
}

TEST_CASE("stride and residue chains") {
  const FockSpace sp(11, 1.0);
  const auto op = BandedOperator::build_hermitian(sp, 2, 4, [&](int r, int c) {
    const int dn = (c % 11) - (r % 11);
    return (dn == 0 || std::abs(dn) == 2 || std::abs(dn) == 4) ? Complex(1.0 + r, 0.5 * c) : Complex(0.0);
  });
  CHECK(op.stride() == 2);
  const Matrix d = op.to_dense();
  for (int r = 0; r < 2; ++r) {
    const auto ch = op.chain(r, 2);
    const int len = (11 - r + 1) / 2;
    CHECK(ch.dim() == len);
    for (int q = 0; q < 2; ++q)
      for (int qc = 0; qc < 2; ++qc)
        for (int i = 0; i < len; ++i)
          for (int j = 0; j < len; ++j)
            CHECK(ch(q * len + i, qc * len + j) == d(q * 11 + r + 2 * i, qc * 11 + r + 2 * j));
  }
  CHECK(ladder_ops(sp).n_op.stride() == 0);
  CHECK(ladder_ops(sp).n_op.is_diagonal());
}

TEST_CASE("kron with a qubit operator") {
  const FockSpace sp(6, 1.0);
  Eigen::Matrix2cd sx;
  sx << 0, 1, 1, 0;
  const auto k = BandedOperator::kron_qubit(sx, ladder_ops(sp).n_op);
  Matrix ref = Matrix::Zero(12, 12);
  for (int n = 0; n < 6; ++n) ref(n, 6 + n) = ref(6 + n, n) = double(n);
  CHECK((k.to_dense() - ref).norm() == 0.0);
}

TEST_CASE("phase aligned distance ignores global phase") {
  Matrix a = Matrix::Random(10, 10);
  CHECK(phase_aligned_distance(a, std::polar(1.0, 0.7) * a, 10) < 1e-14);
  Matrix b = a;
  b(9, 9) += 1.0;
  CHECK(phase_aligned_distance(a, b, 5) < 1e-14);
  CHECK(phase_aligned_distance(a, b, 10) > 0.5);
}

TEST_CASE("state text round trip is exact") {
  const FockSpace sp(20, 1.0);
  const auto psi = tensor_qubit(Eigen::Vector2cd(0.6, Complex(0.0, 0.8)), coherent_state(sp, Complex(1.0, -0.5)));
  std::stringstream ss;
  write_state(ss, psi);
  const auto back = read_state(ss);
  CHECK(back.qubit_levels() == 2);
  CHECK((back.amplitudes() - psi.amplitudes()).norm() == 0.0);
  std::istringstream bad("nonsense\n");
  CHECK_THROWS_AS(read_state(bad), std::invalid_argument);
}

TEST_CASE("expectation of a and edge weight") {
  const FockSpace sp(64, 1.0);
  const Complex alpha(1.2, -0.4);
  CHECK(std::abs(expect_a(coherent_state(sp, alpha)) - alpha) < 1e-12);
  CHECK(edge_weight(fock_state(sp, 63), 1) == 1.0);
  CHECK(edge_weight(fock_state(sp, 10), 10) == 0.0);
}
