#include "stam/evolution.hpp"
#include "stam/stam.hpp"

#include <doctest.h>

#include <cmath>

using namespace stam;

TEST_CASE("schedule shape and validation") {
  const Schedule s{20.377, 4.0, 0.376974, 5e-6};
  CHECK(s.lambda(5e-6) == doctest::Approx(20.377 - 0.376974));
  CHECK(s.lambda(0.0) == doctest::Approx(20.377 * std::exp(-4.0) - 0.376974));
  CHECK_NOTHROW(s.validate());
  const Schedule sq{-0.509165, 4.0, -0.00916497, 1e-6};
  CHECK(sq.end_value() == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK_NOTHROW(sq.validate());
  CHECK_THROWS_AS((Schedule{1.0, 4.0, 0.0, 1.0}).validate(), std::invalid_argument);  // lambda(0) too large
  CHECK_THROWS_AS((Schedule{20.377, 4.0, 0.376974, 0.0}).validate(), std::invalid_argument);
}

TEST_CASE("constant pulse rotates about lambda eps") {
  const double w = 2 * kPi * 1e6;
  const FockSpace sp(128, w);
  const Complex eps(1.0, 0.5);
  const double theta_prev = 2.0, lam = 3.0;
  const auto psi = coherent_state(sp, theta_prev * eps);
  const auto out = propagate_const(H_1_explicit(sp, eps, lam), kPi / w, psi);
  CHECK(fidelity(out, coherent_state(sp, (2 * lam - theta_prev) * eps)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK((propagate_const(H_1_explicit(sp, eps, lam), 0.0, psi).amplitudes() - psi.amplitudes()).norm() == 0.0);
  CHECK_THROWS_AS(propagate_const(free_hamiltonian(sp), -1.0, psi), std::invalid_argument);
}

TEST_CASE("observer sees evenly spaced samples") {
  const FockSpace sp(32, 1.0);
  std::vector<double> ts;
  propagate_const(free_hamiltonian(sp), 2.0, fock_state(sp, 1), [&](const Sample& s) { ts.push_back(s.t); }, 3);
  REQUIRE(ts.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(ts[i] == doctest::Approx(0.5 * i));
}

TEST_CASE("constant schedule equals a single constant pulse") {
  // lambda(t) = A - C for B = 0.
  const FockSpace sp(64, 1.0);
  const Schedule flat{1.5, 0.0, 0.5, 2.0};
  auto builder = [&](double l) { return H_1_explicit(sp, 1.0, l); };
  const auto a = propagate_schedule(builder, flat, fock_state(sp, 0), 7);
  const auto b = propagate_const(H_1_explicit(sp, 1.0, 1.0), 2.0, fock_state(sp, 0));
  CHECK((a.amplitudes() - b.amplitudes()).norm() < 1e-11);
}

TEST_CASE("step doubling converges and reports the accepted count") {
  const FockSpace sp(64, 1.0);
  const Schedule sched{2.0, 4.0, 2.0 * std::exp(-4.0), 3.0};
  auto builder = [&](double l) { return H_1_explicit(sp, 1.0, l); };
  int samples = 0;
  const auto r = propagate_schedule_converged(builder, sched, fock_state(sp, 0), 16, 1e-6, 12,
                                              [&](const Sample&) { ++samples; }, 10);
  CHECK(r.difference <= 1e-6);
  CHECK(samples >= 11);
  const auto again = propagate_schedule(builder, sched, fock_state(sp, 0), r.steps);
  CHECK((again.amplitudes() - r.state.amplitudes()).norm() == 0.0);
  CHECK_THROWS_AS(propagate_schedule_converged(builder, sched, fock_state(sp, 0), 1, 1e-14, 1), ConvergenceError);
}

TEST_CASE("empty sequence is the identity") {
  const FockSpace sp(16, 1.0);
  const auto psi = coherent_state(sp, 0.5);
  CHECK((run_sequence(PulseSequence{}, psi).amplitudes() - psi.amplitudes()).norm() == 0.0);
}

TEST_CASE("sequence observer reports checkpoints and the clock") {
  const double w = 2 * kPi * 1e6;
  const FockSpace sp(128, w);
  const auto plan = make_plan(1, 1.0, 4.0, 4, w);
  const auto seq = build_boson_sequence(plan, sp);
  std::vector<int> cps;
  double last_t = -1.0;
  run_sequence(seq, fock_state(sp, 0), [&](const Sample& s) {
    if (s.checkpoint) cps.push_back(s.checkpoint);
    CHECK(s.t >= last_t);
    last_t = s.t;
  }, 3);
  CHECK(cps == std::vector<int>{1, 2, 3, 4});
  CHECK(last_t == doctest::Approx(4 * kPi / w));
  CHECK(seq.total_time() == doctest::Approx(4 * kPi / w));
  CHECK(seq.checkpoint_count() == 4);
}

TEST_CASE("composite pulse with lambda = 0 is free evolution") {
  const FockSpace sp(32, 1.0);
  const auto seq = composite_pulse(sp, {2, Complex(0.0, 3.0)}, 0.0);
  REQUIRE(seq.segments.size() == 3);
  const Matrix u = sequence_unitary(seq);
  CHECK((u - propagator_dense(free_hamiltonian(sp), kPi / 2)).norm() < 1e-12);
  CHECK(seq.total_time() == doctest::Approx(kPi / 2));
}

TEST_CASE("composite pulse equals the direct exponential") {
  SUBCASE("J = 1") {
    const FockSpace sp(256, 1.0);
    const auto u = sequence_unitary(composite_pulse(sp, {1, 1.0}, 2.5));
    CHECK(phase_aligned_distance(u, propagator_dense(H_1_explicit(sp, 1.0, 2.5), kPi), 16) <= 1e-8);
  }
  SUBCASE("J = 2") {
    const FockSpace sp(512, 1.0);
    const Complex eps(0.0, 3.0);
    const auto u = sequence_unitary(composite_pulse(sp, {2, eps}, -0.125));
    CHECK(phase_aligned_distance(u, propagator_dense(H_2_explicit(sp, eps, -0.125), kPi / 2), 16) <= 1e-7);
  }
}

TEST_CASE("composite refuses a leaking generator") {
  const FockSpace sp(32, 1.0);
  CHECK_THROWS_AS(composite_pulse(sp, {1, 1.0}, 4.0), TruncationError);
  CHECK(generator_leakage(sp, {1, 1.0}, 0.1) < 1e-20);
}
