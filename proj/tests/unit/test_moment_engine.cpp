#include <doctest.h>

#include <cmath>

#include "matryoshka/euler_reference.hpp"
#include "matryoshka/moment_engine.hpp"
#include "matryoshka/process_library.hpp"
#include "oracles.hpp"

using namespace matryoshka;

namespace {

CoefficientSystem scalar_system(double shift, double rate) {
  return CoefficientSystem(MatryoshkanMatrix::from_rows({{rate}}), {shift});
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_SUITE("moment_engine") {

TEST_CASE("coefficient system shape is checked") {
  CHECK_THROWS_AS(CoefficientSystem(MatryoshkanMatrix(2), {1.0}), Error);
  const auto built = build_hawkes(HawkesSpec{}, 4);
  CHECK(built.system.leading(2).theta == built.system.theta.leading(2));
  CHECK(built.system.leading(2).theta0.size() == 2);
}

TEST_CASE("initial moment vector holds powers of x0") {
  const auto init = InitialMomentVector::from_value(1.5, 4);
  CHECK(init.powers == std::vector<double>{1.5, 2.25, 3.375, 5.0625});
}

TEST_CASE("transient vector") {
  const auto built = build_hawkes(HawkesSpec{1, 1, 2, 1.7}, 5);
  CHECK(transient_vector(built.system, built.init, 0.0).values == built.init.powers);

  const auto v = transient_vector(scalar_system(1.0, -1.0), InitialMomentVector::from_value(0.0, 1), 1.0);
  CHECK(v.values[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(v.time == 1.0);
  CHECK_FALSE(v.stationary());

  const auto hawkes = build_hawkes(HawkesSpec{1, 1, 2, 1}, 1);
  CHECK(transient_vector(hawkes.system, hawkes.init, 1.0).values[0] ==
        doctest::Approx(2.0 - std::exp(-1.0)).epsilon(1e-15));

  CHECK_THROWS_AS(transient_vector(hawkes.system, hawkes.init, -1.0), Error);
  const auto singular = build_hawkes(HawkesSpec{1, 2, 2, 1}, 2);
  try {
    (void)transient_vector(singular.system, singular.init, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMatrix);
  }
}

TEST_CASE("transient vector equals the dense exponential formula") {
  oracle::Rng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = rng.integer(1, 10);
    const auto theta = oracle::random_matrix(rng, n, 0.5, 1.0, true);
    std::vector<double> theta0(n);
    for (double& v : theta0) v = rng.uniform(-1, 1);
    const CoefficientSystem system(theta, theta0);
    const auto init = InitialMomentVector::from_value(rng.uniform(-1, 1), n);
    const double t = rng.uniform(0, 3);
    // s(t) = e^{At} s0 + int_0^t e^{A(t-u)} du theta0 via augmented exponential.
    oracle::Dense aug(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) aug(i, j) = theta(i, j);
      aug(i, n) = theta0[i];
    }
    const auto e = oracle::taylor_exp(aug, t);
    const auto s = transient_vector(system, init, t).values;
    for (std::size_t i = 0; i < n; ++i) {
      double want = e(i, n);
      for (std::size_t j = 0; j < n; ++j) want += e(i, j) * init.powers[j];
      CHECK(std::abs(s[i] - want) <= 1e-11 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("transient scalar agrees with the vector solution") {
  for (const auto& f : oracle::benchmark_fixtures()) {
    const auto built = build(f.spec, f.order);
    for (double t : {0.0, 0.3, 2.0, f.horizon}) {
      const auto v = transient_vector(built.system, built.init, t).values;
      for (std::size_t n = 1; n <= f.order; ++n) {
        const double s = transient_scalar(built.system, built.init, t, n);
        CHECK_MESSAGE(std::abs(s - v[n - 1]) <= 1e-9 * std::max(1.0, std::abs(v[n - 1])),
                      f.name << " n=" << n << " t=" << t);
      }
    }
  }
  const auto single = scalar_system(2.0, -3.0);
  const auto init = InitialMomentVector::from_value(1.0, 1);
  CHECK(transient_scalar(single, init, 0.5, 1) ==
        doctest::Approx(2.0 / 3.0 + (1.0 - 2.0 / 3.0) * std::exp(-1.5)).epsilon(1e-15));
  CHECK_THROWS_AS(transient_scalar(single, init, 0.5, 2), Error);
}

TEST_CASE("Hawkes second moment matches a fine Euler solve") {
  const auto built = build_hawkes(HawkesSpec{1, 1, 2, 1}, 2);
  const double closed = transient_scalar(built.system, built.init, 10.0, 2);
  const auto euler = euler_solve(built.system, built.init, EulerConfig{1e-6, 10.0});
  CHECK(rel(euler.values[1], closed) <= 1e-5);
}

TEST_CASE("closely spaced growth-collapse diagonals") {
  // Diagonals -k mu / (k + 1) crowd together; check the flow property
  // s(8) = flow_4(s(4)) and agreement with the row-by-row scalar formula.
  const auto gc = build_growth_collapse(GrowthCollapseSpec{1, 0.5, 0, JumpMomentSpec::uniform()}, 20);
  const auto half = transient_vector(gc.system, gc.init, 4.0);
  const auto full = transient_vector(gc.system, gc.init, 8.0);
  InitialMomentVector mid{half.values[0], half.values};
  const auto twice = transient_vector(gc.system, mid, 4.0);
  for (std::size_t k = 0; k < 20; ++k) {
    CHECK(rel(twice.values[k], full.values[k]) <= 1e-12);
    CHECK(rel(transient_scalar(gc.system, gc.init, 8.0, k + 1), full.values[k]) <= 1e-12);
  }
  CHECK(oracle::ode_residual(gc.system, gc.init, 2.0, 1e-4) <= 1e-6);
}

TEST_CASE("steady states") {
  const auto hawkes = build_hawkes(HawkesSpec{1, 1, 2, 1}, 2);
  const auto s = steady_vector(hawkes.system);
  CHECK(s.stationary());
  CHECK(rel(s.values[0], 2.0) <= 1e-15);
  CHECK(rel(s.values[1], 5.0) <= 1e-15);

  const auto gc = build_growth_collapse(GrowthCollapseSpec{1, 0.5, 0, JumpMomentSpec::uniform()}, 3);
  // (n + 1)! (lambda / mu)^n at n = 3
  CHECK(rel(steady_nth(gc.system, 3), 192.0) <= 1e-14);

  const auto eph = build_ephemeral(EphemeralSpec{1, 2, 3, 0}, 2);
  const auto e = steady_recursive(eph.system);
  CHECK(rel(e.values[0], 1.0) <= 1e-15);
  CHECK(rel(e.values[1], 4.0) <= 1e-15);

  const auto ou = build_ito(ItoSpec{0, -1, 1, 0, 0}, 2);
  CHECK(rel(steady_vector(ou.system).values[1], 0.5) <= 1e-15);

  const auto scalar = scalar_system(3.0, -4.0);
  CHECK(steady_nth(scalar, 1) == -3.0 / -4.0);

  const auto shot = build_shot_noise(ShotNoiseSpec{1, 4, JumpMomentSpec::lognormal(0, 1), 0}, 2);
  const auto sv = steady_vector(shot.system);
  CHECK(rel(sv.values[0], std::exp(0.5) / 4.0) <= 1e-15);
  CHECK(rel(sv.values[1], (std::exp(2.0) + std::exp(1.0) / 2.0) / 8.0) <= 1e-14);
  CHECK(sv.values[0] == doctest::Approx(0.412180).epsilon(1e-6));
  CHECK(sv.values[1] == doctest::Approx(1.093525).epsilon(1e-6));
}

TEST_CASE("three steady-state routes agree") {
  for (const auto& f : oracle::benchmark_fixtures()) {
    const auto built = build(f.spec, f.order);
    if (built.system.theta.diag(0) >= 0.0) continue;  // CIR with theta > 0 is not stationary
    const auto a = steady_vector(built.system).values;
    const auto b = steady_recursive(built.system).values;
    for (std::size_t n = 1; n <= f.order; ++n) {
      CHECK(rel(b[n - 1], a[n - 1]) <= 1e-13);
      CHECK(rel(steady_nth(built.system, n), a[n - 1]) <= 1e-10);
    }
  }
}

TEST_CASE("long-horizon transient converges to the steady state") {
  const auto built = build_hawkes(HawkesSpec{1, 1, 2, 3}, 6);
  const auto late = transient_vector(built.system, built.init, 200.0).values;
  const auto steady = steady_vector(built.system).values;
  for (std::size_t k = 0; k < 6; ++k) CHECK(rel(late[k], steady[k]) <= 1e-10);
}

TEST_CASE("steady state of a non-stationary system is rejected") {
  const auto cir = build_ito(ItoSpec{1, 1, 1, 1, 0}, 3);
  try {
    (void)steady_vector(cir.system);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonStationary);
    CHECK(e.is_numerical());
  }
  CHECK_THROWS_AS(steady_nth(cir.system, 2), Error);
}

TEST_CASE("validate") {
  const auto good = build_hawkes(HawkesSpec{1, 1, 2, 1}, 4);
  const auto d = validate(good.system);
  CHECK(d.stationary);
  CHECK(d.distinct);
  CHECK(d.summary() == "stationary: yes");

  const auto critical = build_hawkes(HawkesSpec{1, 2, 2, 1}, 3);
  const auto dc = validate(critical.system);
  CHECK(dc.singular);
  CHECK(dc.summary().rfind("stationary: no; singular", 0) == 0);

  for (double gamma : {0.0, 1.0}) {
    const auto flat = build_ito(ItoSpec{1, 0, 1, gamma, 0}, 3);
    const auto df = validate(flat.system);
    CHECK(df.zero_diagonals.size() == 3);
    CHECK_FALSE(df.warnings.empty());
    CHECK(df.warnings.front().find("SingularMatrix") != std::string::npos);
  }

  const auto huge = build_shot_noise(ShotNoiseSpec{1, 1, JumpMomentSpec::lognormal(0, 2.5), 0}, 15);
  const auto dh = validate(huge.system);
  REQUIRE(dh.predicted_overflow_order.has_value());
  CHECK(*dh.predicted_overflow_order <= 15);
}

TEST_CASE("transient results beyond 1e300 are reported as overflow") {
  const auto built = build_shot_noise(ShotNoiseSpec{1, 1, JumpMomentSpec::lognormal(0, 2.5), 0}, 15);
  try {
    (void)transient_vector(built.system, built.init, 5.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Overflow);
  }
}

TEST_CASE("ODE residual on process fixtures") {
  for (const auto& f : oracle::benchmark_fixtures()) {
    const auto built = build(f.spec, f.order);
    for (double t : {0.5, 2.0}) CHECK_MESSAGE(oracle::ode_residual(built.system, built.init, t, 1e-4) <= 1e-5, f.name);
  }
}

}  // TEST_SUITE
