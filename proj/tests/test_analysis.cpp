#include "stam/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace stam;

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328));
  for (double p = 0.05; p < 1.0; p += 0.05) {
    CHECK(binary_entropy(p) >= 0.0);
    CHECK(binary_entropy(p) <= 1.0);
    CHECK(binary_entropy(p) == doctest::Approx(binary_entropy(1.0 - p)));
  }
}

TEST_CASE("cat entropy closed form") {
  // H2((1 + x)/2) for x = e^{-8}, expanded to second order in x.
  const double x = std::exp(-8.0);
  CHECK(1.0 - cat_entropy(2.0) == doctest::Approx(x * x / (2.0 * std::log(2.0))).epsilon(1e-6));
  CHECK(cat_entropy(0.0) == 0.0);
}

TEST_CASE("qubit and boson entropies agree") {
  const FockSpace sp(40, 2 * kPi * 1e6);
  const auto seq = build_hybrid_sequence(1.5, 3, sp);
  int n = 0;
  run_sequence(seq, tensor_qubit(Eigen::Vector2cd(1.0, 0.0), fock_state(sp, 0)), [&](const Sample& s) {
    ++n;
    const double a = entanglement_entropy(s.state), b = boson_entropy(s.state);
    CHECK(a >= -1e-12);
    CHECK(a <= 1.0 + 1e-12);
    CHECK(std::abs(a - b) <= 1e-9);
  }, 7);
  CHECK(n > 10);
  CHECK_THROWS_AS(entanglement_entropy(fock_state(sp, 0)), std::invalid_argument);
}

TEST_CASE("coherent trajectory follows the analytic circle") {
  const FockSpace sp(64, 1.0);
  const Complex eps = 1.0;
  double worst = 0.0;
  propagate_const(H_1_explicit(sp, eps, 1.0), kPi, fock_state(sp, 0), [&](const Sample& s) {
    worst = std::max(worst, std::abs(expect_a(s.state) - coherent_trajectory_analytic(0.0, 1.0, eps, 1.0, s.t)));
  }, 40);
  CHECK(worst <= 1e-6);
  CHECK(std::abs(coherent_trajectory_analytic(0.0, 1.0, eps, 1.0, kPi) - 2.0) < 1e-15);
}

TEST_CASE("trace recorder rows and CSV") {
  const FockSpace sp(48, 2 * kPi * 1e6);
  const auto plan = make_plan(1, 1.0, 2.0, 2, sp.omega_c());
  TraceTargets tt;
  tt.target = coherent_state(sp, 2.0);
  tt.checkpoint = [&](int k) { return coherent_state(sp, plan.checkpoints[k]); };
  TraceRecorder rec(tt);
  run_sequence(build_boson_sequence(plan, sp), fock_state(sp, 0), rec.observer(), 4);
  // 4 interior samples plus both ends per pulse; the shared boundary collapses.
  CHECK(rec.rows().size() == 11);
  CHECK(rec.checkpoint_fidelities().size() == 2);
  CHECK(rec.min_checkpoint_fidelity() > 1.0 - 1e-9);
  CHECK(rec.rows().back().t == doctest::Approx(2 * plan.t_p));

  std::ostringstream os;
  rec.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t_us,fidelity_target,fidelity_instantaneous,entropy,re_a,im_a,norm,lambda");
  std::getline(is, line);
  CHECK(line.rfind("0,", 0) == 0);
  // No instantaneous target and no qubit: two empty fields.
  CHECK(line.find(",,,") != std::string::npos);
}

TEST_CASE("cross grid") {
  const auto g = cross_grid({-0.02, 0.0, 0.02});
  REQUIRE(g.size() == 5);
  CHECK(g[0].delta_lambda == -0.02);
  CHECK(g[1].delta_omega == -0.02);
  CHECK((g[2].delta_lambda == 0.0 && g[2].delta_omega == 0.0));
  CHECK(g[4].delta_omega == 0.02);
}

TEST_CASE("boson robustness scan") {
  BosonScanSpec spec;
  spec.theta = 2.0;
  spec.omega_c = 2 * kPi * 100e6;
  spec.n_pulses = {5, 10};
  spec.errors = cross_grid({0.0, 0.02});
  const auto r = robustness_scan_boson(spec);
  REQUIRE(r.cells.size() == 6);
  CHECK(r.at(0.0, 0.0, 5).fidelity > 1.0 - 1e-9);
  CHECK(r.at(0.0, 0.0, 5).converged);
  CHECK(r.at(0.0, 0.02, 10).fidelity >= r.at(0.0, 0.02, 5).fidelity);
  CHECK_THROWS_AS(r.at(0.5, 0.0, 5), std::out_of_range);

  std::ostringstream a, b;
  r.write_csv(a);
  robustness_scan_boson(spec).write_csv(b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("delta_lambda,delta_omega,n_pulses,fidelity,converged\n", 0) == 0);

  BosonScanSpec big = spec;
  big.hybrid = false;
  big.n_pulses = {5};
  big.errors = {{1.0, 0.0}};
  CHECK(robustness_scan_boson(big).cells[0].fidelity < 0.9);
}

TEST_CASE("qubit robustness scan") {
  QubitScanSpec spec;
  spec.lambda = 0.05;
  spec.omega_c = 2 * kPi * 1e5;
  spec.Omega = 2 * kPi * 50e6;
  spec.dim = 64;
  spec.n_pulses = {10};
  spec.deltas = {0.0, 0.1};
  const auto r = robustness_scan_qubit(spec);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.at(0.0, 10).fidelity >= 0.99);
  CHECK(r.at(0.0, 10).converged);
  std::ostringstream os;
  r.write_csv(os);
  CHECK(os.str().rfind("delta_qubit,n_pulses,fidelity,converged\n", 0) == 0);
}

TEST_CASE("convergence audit") {
  const auto vac = convergence_audit([](int d) { return fidelity(fock_state(FockSpace(d, 1.0), 0), fock_state(FockSpace(d, 1.0), 0)); }, 16);
  CHECK(vac.delta == 0.0);
  CHECK(vac.passed);

  // Squeezed vacuum with |xi| = 3 has <n> = sinh^2 3 ~ 100 and a long tail.
  const MultiSqueezeSpec sq{2, Complex(0.0, 3.0)};
  const auto squeezed = convergence_audit(
      [&](int d) {
        const FockSpace sp(d, 1.0);
        const auto seq = build_boson_sequence(make_plan(2, sq.epsilon, -0.5, 20, 1.0), sp);
        return fidelity(adiabatic_state(sp, sq, -0.5), run_sequence(seq, fock_state(sp, 0)));
      },
      256);
  CHECK_FALSE(squeezed.passed);
  CHECK(squeezed.dim_doubled == 512);

  const auto coh = convergence_audit(
      [](int d) {
        const FockSpace sp(d, 2 * kPi * 1e6);
        const auto seq = build_boson_sequence(make_plan(1, 1.0, 20.0, 5, sp.omega_c()), sp);
        return fidelity(coherent_state(sp, 20.0), run_sequence(seq, fock_state(sp, 0)));
      },
      700);
  CHECK(coh.passed);
  CHECK(coh.fidelity > 1.0 - 1e-6);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(50, 0);
  parallel_for(50, [&](int i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(4, [](int i) {
                    if (i == 2) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
