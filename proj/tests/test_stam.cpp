#include "stam/analysis.hpp"
#include "stam/stam.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numeric>

using namespace stam;

namespace {

// The integrand sampled on unit cells of width Theta / (2N): cell i lies past
// the sampling points lambda_j = 2j - 1 with j <= (i + 1) / 2.
long long cell_sum(int n, int k) {
  long long acc = 0;
  for (int i = 0; i < 2 * k; ++i) {
    const int passed = std::min(n, (i + 1) / 2);
    acc += passed % 2 == 0 ? 1 : -1;
  }
  return acc;
}

}  // namespace

TEST_CASE("plan values") {
  const double w = 2 * kPi * 1e6;
  const auto p = make_plan(2, Complex(0.0, 3.0), -0.5, 4, w);
  REQUIRE(p.lambdas.size() == 4);
  REQUIRE(p.checkpoints.size() == 5);
  for (int k = 1; k <= 4; ++k) CHECK(p.lambdas[k - 1] == doctest::Approx(-0.5 * (2 * k - 1) / 8.0));
  for (int k = 0; k <= 4; ++k) CHECK(p.checkpoints[k] == doctest::Approx(-0.5 * k / 4.0));
  CHECK(p.t_p == doctest::Approx(0.25e-6));
  CHECK(make_plan(1, 1.0, 20.0, 1, w).t_p == doctest::Approx(0.5e-6));
  CHECK_THROWS_AS(make_plan(0, 1.0, 1.0, 4, w), std::invalid_argument);
  CHECK_THROWS_AS(make_plan(1, 1.0, 1.0, 0, w), std::invalid_argument);
  const std::string js = plan_json(p);
  CHECK(js.find("\"lambdas\"") != std::string::npos);
  CHECK(js.find("\"t_p\"") != std::string::npos);
}

TEST_CASE("sign integral vanishes exactly at every checkpoint") {
  for (int n = 1; n <= 60; ++n)
    for (int k = 0; k <= n; ++k) {
      const Rational r = sign_integral(n, k);
      const long long ref = cell_sum(n, k);
      CHECK(r.num == ref / std::gcd(ref, 2LL * n));
      CHECK(r.num == 0);
    }
  for (int n : {1, 2, 7, 100, 999, 1000}) CHECK(sign_cancellation_exact(n));
  CHECK_THROWS_AS(sign_integral(4, 5), std::invalid_argument);
  CHECK_THROWS_AS(sign_integral(0, 0), std::invalid_argument);
}

TEST_CASE("adiabatic eigenstates") {
  const FockSpace sp(96, 1.0);
  const Complex eps(0.4, 0.3);
  CHECK(fidelity(adiabatic_state(sp, {1, eps}, 2.0), coherent_state(sp, 2.0 * eps)) == doctest::Approx(1.0));

  // J = 2 against a dense exponential of the generator on a padded space.
  const FockSpace big(192, 1.0);
  const MultiSqueezeSpec spec{2, Complex(0.0, 3.0)};
  const Matrix u = (Complex(0.0, 0.1) * generator_G(big, spec).to_dense()).exp();
  const Vector ref = u.col(0).head(96);
  const auto got = adiabatic_state(sp, spec, -0.1);
  CHECK(std::norm(ref.dot(got.amplitudes())) > 1.0 - 1e-10);

  // The ground state of H_2 is the squeezed vacuum.
  const auto h = H_2_explicit(sp, spec.epsilon, -0.1);
  const Vector hv = h.apply(got.amplitudes());
  CHECK(hv.head(48).norm() < 1e-9);
}

TEST_CASE("common sign of W at multiples of the pulse length") {
  const FockSpace sp(24, 2 * kPi * 1e6);
  for (int J : {1, 2, 3}) {
    const MultiSqueezeSpec spec{J, 1.0};
    const double tp = kPi / (J * sp.omega_c());
    CAPTURE(J);
    CHECK(common_sign(tp, spec, sp) == std::optional<int>(-1));
    CHECK(common_sign(2 * tp, spec, sp) == std::optional<int>(1));
    CHECK(common_sign(3 * tp, spec, sp) == std::optional<int>(-1));
    CHECK_FALSE(common_sign(0.5 * tp, spec, sp).has_value());
  }
  const Matrix w = W_operator(0.3, 0.0, {1, 1.0}, sp);
  CHECK(std::abs(w(1, 0) - coupling_g(1, 0, {1, 1.0})) < 1e-15);
  CHECK(w(0, 0) == Complex(0.0));
}

TEST_CASE("phase ledger parity") {
  const FockSpace sp(30, 1.0);
  for (int J : {1, 2, 4}) {
    const double tp = kPi / J;
    CAPTURE(J);
    CHECK(parity_check(phase_ledger(sp, J, tp)) == std::optional<int>(-1));
    CHECK(parity_check(phase_ledger(sp, J, 2 * tp)) == std::optional<int>(1));
    CHECK_FALSE(parity_check(phase_ledger(sp, J, 0.3 * tp)).has_value());
  }
  const auto l = phase_ledger(sp, 2, 0.5);
  CHECK(l.phases(3) == doctest::Approx(1.5));
}

TEST_CASE("adiabatic decomposition") {
  const FockSpace sp(32, 1.0);
  const MultiSqueezeSpec spec{1, 1.0};
  const auto d0 = adiabatic_decomposition(Matrix::Identity(32, 32), 0.0, 0.0, sp, spec, 4);
  CHECK(d0.distance < 1e-14);

  const FockSpace s64(64, 1.0);
  const auto plan = make_plan(1, 1.0, 2.0, 2, 1.0);
  const Matrix u = sequence_unitary(build_boson_sequence(plan, s64));
  const auto d = adiabatic_decomposition(u, 2.0, 2 * plan.t_p, s64, spec, 8);
  CHECK(d.distance < 1e-6);
  CHECK((d.u_adia * d.u_err - u).norm() < 1e-9);
  CHECK_THROWS_AS(adiabatic_decomposition(Matrix::Identity(600, 600), 0.0, 0.0, FockSpace(600, 1.0), spec, 8),
                  std::invalid_argument);
}

TEST_CASE("composite pulses reproduce the direct protocol") {
  const FockSpace sp(128, 1.0);
  const auto plan = make_plan(1, 1.0, 3.0, 3, 1.0);
  const auto direct = run_sequence(build_boson_sequence(plan, sp), fock_state(sp, 0));
  const auto comp = run_sequence(build_boson_sequence(plan, sp, true), fock_state(sp, 0));
  CHECK(fidelity(direct, comp) > 1.0 - 1e-6);
  CHECK(fidelity(direct, coherent_state(sp, 3.0)) > 1.0 - 1e-9);
}

TEST_CASE("miscalibrated lambda maps the checkpoints") {
  const FockSpace sp(96, 1.0);
  const auto plan = make_plan(1, 1.0, 2.0, 5, 1.0);
  const auto out = run_sequence(build_boson_sequence(plan, sp, false, {0.1, 0.0}), fock_state(sp, 0));
  CHECK(fidelity(out, coherent_state(sp, 2.2)) > 1.0 - 1e-9);
}

TEST_CASE("hybrid cat") {
  const FockSpace sp(64, 2 * kPi * 1e6);
  const auto cat = hybrid_cat(sp, 2.0);
  CHECK(cat.amplitudes().norm() == doctest::Approx(1.0));
  CHECK(entanglement_entropy(cat) == doctest::Approx(cat_entropy(2.0)).epsilon(1e-12));
  const auto vac = tensor_qubit(Eigen::Vector2cd(1.0, 0.0), fock_state(sp, 0));
  const auto out = run_sequence(build_hybrid_sequence(2.0, 5, sp), vac);
  CHECK(fidelity(out, cat) > 1.0 - 1e-9);
}

TEST_CASE("amplified sequence structure") {
  const FockSpace sp(32, 2 * kPi * 1e5);
  AmplifiedOptions o;
  o.n_pulses = 4;
  o.omega_c = sp.omega_c();
  o.Omega = 2 * kPi * 50e6;
  const auto seq = build_amplified_sequence(sp, o);
  CHECK(seq.segments.size() == 7);
  CHECK(seq.checkpoint_count() == 4);
  CHECK(seq.total_time() == doctest::Approx(4 * kPi / o.omega_c));
  o.synchronized = false;
  CHECK(build_amplified_sequence(sp, o).total_time() == doctest::Approx(4 * kPi / o.omega_c + 3 * kPi / o.Omega));
  o.instantaneous_flip = true;
  CHECK(build_amplified_sequence(sp, o).total_time() == doctest::Approx(4 * kPi / o.omega_c));
}

TEST_CASE("alternating flip signs echo out a miscalibrated qubit pulse") {
  const FockSpace sp(96, 2 * kPi * 1e5);
  AmplifiedOptions o;
  o.lambda = 0.05;
  o.n_pulses = 20;
  o.omega_c = sp.omega_c();
  o.Omega = 2 * kPi * 50e6;
  o.delta = 0.1;
  const double alt = amplified_fidelity(sp, o);
  o.alternate_ctrl_sign = false;
  const double fixed = amplified_fidelity(sp, o);
  CHECK(alt > fixed);
  o.delta = 0.0;
  o.instantaneous_flip = true;
  CHECK(amplified_fidelity(sp, o) > 1.0 - 1e-9);
}
