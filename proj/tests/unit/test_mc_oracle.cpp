#include <doctest.h>

#include <cmath>

#include "matryoshka/mc_oracle.hpp"
#include "oracles.hpp"

using namespace matryoshka;

namespace {

void within_sigmas(const MomentEstimate& e, double truth, double sigmas = 4.0) {
  CHECK_MESSAGE(std::abs(e.mean - truth) <= sigmas * e.std_error,
                "order " << e.order << ": estimate " << e.mean << " +- " << e.std_error
                         << " vs " << truth);
}

}  // namespace

TEST_SUITE("mc_oracle") {

TEST_CASE("estimator arithmetic") {
  const std::vector<double> pair{0.0, 2.0};
  const auto r = estimate_moments(pair, 2);
  CHECK(r.estimates[0].mean == 1.0);
  CHECK(r.estimates[0].std_error == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.estimates[1].mean == 2.0);
  CHECK(r.estimates[0].paths == 2);

  const std::vector<double> constant(50, 1.5);
  const auto c = estimate_moments(constant, 3);
  for (const auto& e : c.estimates) {
    CHECK(e.mean == doctest::Approx(std::pow(1.5, static_cast<double>(e.order))).epsilon(1e-15));
    CHECK(e.std_error == 0.0);
  }
  CHECK(c.warnings.empty());

  CHECK_THROWS_AS(estimate_moments(std::vector<double>{}, 1), Error);
  CHECK_THROWS_AS(estimate_moments(std::vector<double>{1.0}, 1), Error);
}

TEST_CASE("heavy tails produce a warning") {
  std::vector<double> values(100, 0.0);
  values[0] = 1000.0;
  const auto r = estimate_moments(values, 1);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("identical configuration gives identical terminals") {
  const ProcessSpec spec = HawkesSpec{1, 1, 2, 1};
  const auto a = simulate(spec, SimConfig{2000, 5.0, 42, 1e-3});
  const auto b = simulate(spec, SimConfig{2000, 5.0, 42, 1e-3});
  CHECK(a == b);
  const auto c = simulate(spec, SimConfig{2000, 5.0, 43, 1e-3});
  CHECK(a != c);
  // Path i does not depend on the total number of paths.
  const auto prefix = simulate(spec, SimConfig{500, 5.0, 42, 1e-3});
  CHECK(std::equal(prefix.begin(), prefix.end(), a.begin()));
}

TEST_CASE("Poisson counter") {
  GenericGeneratorSpec poisson;
  poisson.coefficients[0] = 3.0;
  poisson.up = JumpMomentSpec::deterministic(1.0);
  const double t = 2.0;
  const auto terminals = simulate(poisson, SimConfig{100000, t, 5, 1e-3});
  const auto est = estimate_moments(terminals, 2).estimates;
  const double m = 3.0 * t;
  within_sigmas(est[0], m);
  within_sigmas(est[1], m + m * m);
  for (double v : terminals) CHECK(v == std::floor(v));
}

TEST_CASE("fast decay kills shot noise") {
  const ShotNoiseSpec spec{1.0, 1e4, JumpMomentSpec::deterministic(1.0), 0.0};
  const auto terminals = simulate(spec, SimConfig{1000, 3.0, 1, 1e-3});
  for (double v : terminals) CHECK(v < 1e-3);
}

TEST_CASE("Hawkes matches the closed form") {
  const HawkesSpec spec{1, 1, 2, 1};
  const auto built = build_hawkes(spec, 3);
  const auto truth = transient_vector(built.system, built.init, 10.0).values;
  const auto est = estimate_moments(simulate(spec, SimConfig{100000, 10.0, 2024, 1e-3}), 3).estimates;
  for (std::size_t k = 0; k < 3; ++k) within_sigmas(est[k], truth[k]);
}

TEST_CASE("Hawkes below the baseline uses thinning") {
  const HawkesSpec spec{2, 0.5, 1.5, 0.2};
  const auto built = build_hawkes(spec, 2);
  const auto truth = transient_vector(built.system, built.init, 1.0).values;
  const auto est = estimate_moments(simulate(spec, SimConfig{100000, 1.0, 8, 1e-3}), 2).estimates;
  for (std::size_t k = 0; k < 2; ++k) within_sigmas(est[k], truth[k]);
}

TEST_CASE("growth-collapse approaches its stationary mean") {
  const GrowthCollapseSpec spec{1, 0.5, 0, JumpMomentSpec::uniform()};
  const auto est = estimate_moments(simulate(spec, SimConfig{20000, 100.0, 3, 1e-3}), 1).estimates;
  within_sigmas(est[0], 2 * 1.0 / 0.5);
}

TEST_CASE("jump families agree with the closed form at t = 1") {
  const std::vector<ProcessSpec> specs{
      ShotNoiseSpec{1, 4, JumpMomentSpec::exponential(1.0), 0.5},
      GrowthCollapseSpec{1, 0.5, 1, JumpMomentSpec::uniform()},
      EphemeralSpec{1, 2, 3, 2},
  };
  std::uint64_t seed = 100;
  for (const auto& spec : specs) {
    const auto built = build(spec, 3);
    const auto truth = transient_vector(built.system, built.init, 1.0).values;
    const auto est = estimate_moments(simulate(spec, SimConfig{100000, 1.0, seed++, 1e-3}), 3).estimates;
    for (std::size_t k = 0; k < 3; ++k) within_sigmas(est[k], truth[k]);
  }
}

TEST_CASE("Ornstein-Uhlenbeck diffusion") {
  const ItoSpec spec{0.5, -1, 0.8, 0, 1};
  const auto built = build_ito(spec, 2);
  const auto truth = transient_vector(built.system, built.init, 2.0).values;
  const auto est = estimate_moments(simulate(spec, SimConfig{50000, 2.0, 77, 1e-3}), 2).estimates;
  for (std::size_t k = 0; k < 2; ++k) within_sigmas(est[k], truth[k]);
}

TEST_CASE("explicit moment lists cannot be simulated") {
  const ShotNoiseSpec spec{1, 1, JumpMomentSpec::explicit_moments({1, 2}), 0};
  CHECK_THROWS_AS(simulate(spec, SimConfig{10, 1.0, 1, 1e-3}), Error);
  CHECK_THROWS_AS(simulate(HawkesSpec{1, 1, 2, 1}, SimConfig{10, -1.0, 1, 1e-3}), Error);
}

}  // TEST_SUITE
