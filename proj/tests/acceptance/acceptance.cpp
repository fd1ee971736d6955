// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "matryoshka/euler_reference.hpp"
#include "matryoshka/mc_oracle.hpp"
#include "matryoshka/moment_engine.hpp"
#include "matryoshka/process_library.hpp"
#include "oracles.hpp"

using namespace matryoshka;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Number of representable doubles between a and b.
std::uint64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  std::uint64_t steps = 0;
  double lo = std::min(a, b);
  const double hi = std::max(a, b);
  while (lo < hi && steps < 1000) {
    lo = std::nextafter(lo, hi);
    ++steps;
  }
  return steps;
}

// max |got - ref| / max(1, max |ref|)
double dense_rel_dev(const oracle::Dense& got, const oracle::Dense& ref) {
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < ref.a.size(); ++i) {
    scale = std::max(scale, std::abs(ref.a[i]));
    worst = std::max(worst, std::abs(got.a[i] - ref.a[i]));
  }
  return worst / scale;
}

// Euler error at each step size, measured by bench on the highest moment.
std::vector<double> euler_errors(const BuiltSystem& b, double t, std::size_t n,
                                 std::vector<double> deltas) {
  const auto records = bench(b.system, b.init, t, n, deltas, 1);
  std::vector<double> out;
  for (std::size_t i = 1; i < records.size(); ++i) out.push_back(records[i].rel_error);
  return out;
}

Outcome hawkes_scaling() {
  Outcome o;
  const auto b = build_hawkes(HawkesSpec{1, 1, 2, 1}, 4);
  const auto err = euler_errors(b, 10.0, 4, {1e-2, 1e-3, 1e-4, 1e-5});
  std::ostringstream os;
  os << "rel err at 1e-2 " << fmt("%.3g", err[0]) << "; decade factors";
  o.pass = err[0] >= 1e-6 && err[0] <= 2e-5;
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double factor = err[i] / err[i + 1];
    os << ' ' << fmt("%.3f", factor);
    o.pass = o.pass && factor >= 8.0 && factor <= 12.0;
  }
  o.detail = os.str();
  return o;
}

Outcome decade_scaling() {
  Outcome o;
  std::ostringstream os;
  for (const auto& f : oracle::benchmark_fixtures()) {
    if (f.name == "hawkes") continue;
    const auto b = build(f.spec, f.order);
    const auto err = euler_errors(b, f.horizon, f.order, {1e-2, 1e-3, 1e-4, 1e-5});
    bool ok = true;
    for (std::size_t i = 0; i + 1 < err.size(); ++i) ok = ok && err[i + 1] < err[i];
    const double f1 = err[1] / err[2];
    const double f2 = err[2] / err[3];
    ok = ok && f1 >= 8.0 && f1 <= 12.0 && f2 >= 8.0 && f2 <= 12.0;
    o.pass = o.pass && ok;
    os << f.name << ' ' << fmt("%.3f", f1) << '/' << fmt("%.3f", f2) << (ok ? "" : " (bad)") << "; ";
  }
  o.detail = os.str();
  return o;
}

Outcome performance() {
  Outcome o;
  const auto b = build_hawkes(HawkesSpec{1, 1, 2, 1}, 100);
  const auto closed = bench(b.system, b.init, 10.0, 100, {}, 20)[0];
  const auto euler = bench(b.system, b.init, 10.0, 100, {1e-5}, 1)[1];
  const double speedup = euler.median_run_time_seconds / closed.median_run_time_seconds;
  o.pass = closed.median_run_time_seconds < 1.0 && speedup >= 100.0;
  o.detail = "closed form " + fmt("%.3g", closed.median_run_time_seconds) + " s, Euler 1e-5 " +
             fmt("%.3g", euler.median_run_time_seconds) + " s, speedup " + fmt("%.3g", speedup);
  return o;
}

Outcome growth_collapse_formula() {
  Outcome o;
  const double lambda = 1.0;
  const double mu = 0.5;
  const auto b = build_growth_collapse(GrowthCollapseSpec{lambda, mu, 0, JumpMomentSpec::uniform()}, 10);
  const auto steady = steady_vector(b.system).values;
  const auto late = transient_vector(b.system, b.init, 200.0).values;
  double worst_steady = 0.0;
  double worst_late = 0.0;
  double worst_alt = 0.0;
  double fact = 1.0;
  for (std::size_t n = 1; n <= 10; ++n) {
    fact *= static_cast<double>(n);
    const double stated = 2.0 * fact * std::pow(lambda / mu, static_cast<double>(n));
    const double recursion = fact * static_cast<double>(n + 1) * std::pow(lambda / mu, static_cast<double>(n));
    worst_steady = std::max(worst_steady, rel(steady[n - 1], stated));
    worst_late = std::max(worst_late, rel(late[n - 1], stated));
    worst_alt = std::max({worst_alt, rel(steady[n - 1], recursion), rel(late[n - 1], recursion)});
  }
  o.pass = worst_steady <= 1e-10 && worst_late <= 1e-8;
  o.detail = "vs 2 n! (l/m)^n: steady " + fmt("%.3g", worst_steady) + ", t=200 " +
             fmt("%.3g", worst_late) + "; vs (n+1)! (l/m)^n: " + fmt("%.3g", worst_alt);
  return o;
}

Outcome stationary_means() {
  Outcome o;
  std::vector<std::pair<std::string, double>> errs;
  errs.emplace_back("hawkes", rel(steady_vector(build_hawkes(HawkesSpec{1, 1, 2, 1}, 3).system).values[0], 2.0));
  errs.emplace_back(
      "shotnoise",
      rel(steady_vector(build_shot_noise(ShotNoiseSpec{1, 4, JumpMomentSpec::lognormal(0, 1), 0}, 3).system).values[0],
          std::exp(0.5) / 4.0));
  errs.emplace_back("ephemeral",
                    rel(steady_vector(build_ephemeral(EphemeralSpec{1, 2, 3, 0}, 3).system).values[0], 1.0));
  double ou = 0.0;
  oracle::Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const double m = rng.uniform(-2, 2);
    const double theta = -rng.uniform(0.1, 3);
    const ItoSpec spec{m, theta, rng.uniform(0, 2), 0, 0};
    ou = std::max(ou, rel(steady_vector(build_ito(spec, 3).system).values[0], -m / theta));
  }
  errs.emplace_back("ou", ou);
  std::ostringstream os;
  for (const auto& [name, e] : errs) {
    o.pass = o.pass && e <= 1e-12;
    os << name << ' ' << fmt("%.2g", e) << "; ";
  }
  o.detail = os.str();
  return o;
}

Outcome ode_residuals() {
  Outcome o;
  double worst = 0.0;
  std::string where;
  for (const auto& f : oracle::benchmark_fixtures()) {
    const auto b = build(f.spec, f.order);
    for (std::size_t n = 1; n <= std::min<std::size_t>(f.order, 10); ++n) {
      const auto sub = b.system.leading(n);
      for (double t : {0.5, 2.0, 10.0}) {
        const double r = oracle::ode_residual(sub, b.init, t, 1e-4);
        if (r > worst) {
          worst = r;
          where = f.name + " n=" + std::to_string(n) + " t=" + fmt("%g", t);
        }
      }
    }
  }
  o.pass = worst <= 1e-5;
  o.detail = "worst residual " + fmt("%.3g", worst) + " (" + where + ")";
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  const std::vector<std::pair<std::string, ProcessSpec>> cases{
      {"hawkes", HawkesSpec{1, 1, 2, 1}},
      {"shotnoise", ShotNoiseSpec{1, 4, JumpMomentSpec::lognormal(0, 1), 0}},
      {"growthcollapse", GrowthCollapseSpec{1, 0.5, 0, JumpMomentSpec::uniform()}},
      {"ephemeral", EphemeralSpec{1, 2, 3, 0}},
  };
  std::ostringstream os;
  const SimConfig cfg{100000, 10.0, 20240501, 1e-3};
  for (const auto& [name, spec] : cases) {
    const auto b = build(spec, 3);
    const auto closed = transient_vector(b.system, b.init, 10.0).values;
    const auto first = simulate(spec, cfg);
    const auto again = simulate(spec, cfg);
    const bool same = first == again;
    const auto est = estimate_moments(first, 3).estimates;
    double worst = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      worst = std::max(worst, std::abs(est[k].mean - closed[k]) / est[k].std_error);
    }
    const bool ok = same && worst <= 4.0;
    o.pass = o.pass && ok;
    os << name << ' ' << fmt("%.2f", worst) << " SE" << (same ? "" : " (nondeterministic)") << "; ";
  }
  o.detail = os.str();
  return o;
}

Outcome core_algebra() {
  Outcome o;
  oracle::Rng rng(2024);
  double inv = 0.0;
  double ex = 0.0;
  double pw = 0.0;
  double eig = 0.0;
  bool prefix_exact = true;
  double prefix_exp = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t n = rng.integer(1, 20);
    const auto m = oracle::random_matrix(rng, n);
    const auto dm = oracle::to_dense(m);

    const auto mi = inverse(m);
    const auto id = oracle::multiply(dm, oracle::to_dense(mi));
    inv = std::max(inv, oracle::max_rel_dev(MatryoshkanMatrix::identity(n), id));

    const double t = rng.uniform(0, 1);
    ex = std::max(ex, oracle::max_rel_dev(exp_scaled(m, t), oracle::taylor_exp(dm, t)));

    const auto k = static_cast<unsigned>(rng.integer(0, 6));
    pw = std::max(pw, oracle::max_rel_dev(power(m, k), oracle::to_dense(power_by_multiplication(m, k))));

    const auto e = eigendecompose(m);
    const auto lhs = oracle::multiply(dm, oracle::to_dense(e.vectors));
    const auto rhs = oracle::to_dense(multiply(e.vectors, MatryoshkanMatrix::diagonal(e.values)));
    eig = std::max(eig, dense_rel_dev(lhs, rhs));

    const std::size_t lead = rng.integer(0, n);
    const auto block = m.leading(lead);
    prefix_exact = prefix_exact && inverse(block) == mi.leading(lead) &&
                   eigendecompose(block).vectors == e.vectors.leading(lead) &&
                   power(block, k) == power(m, k).leading(lead);
    prefix_exp = std::max(prefix_exp, oracle::max_rel_dev(exp_scaled(block, t),
                                                          oracle::to_dense(exp_scaled(m, t).leading(lead))));
  }
  o.pass = inv <= 1e-10 && ex <= 1e-10 && pw <= 1e-11 && eig <= 1e-11 && prefix_exact && prefix_exp <= 1e-12;
  o.detail = "inverse " + fmt("%.2g", inv) + ", exp " + fmt("%.2g", ex) + ", power " + fmt("%.2g", pw) +
             ", eigen " + fmt("%.2g", eig) + ", prefix " + (prefix_exact ? "exact" : "MISMATCH") +
             " / exp " + fmt("%.2g", prefix_exp);
  return o;
}

Outcome generic_equivalence() {
  Outcome o;
  oracle::Rng rng(99);
  std::uint64_t worst = 0;
  int configs = 0;
  auto compare = [&](const BuiltSystem& g, const BuiltSystem& s) {
    const auto gp = g.system.theta.packed();
    const auto sp = s.system.theta.packed();
    if (gp.size() != sp.size() || g.system.theta0.size() != s.system.theta0.size()) {
      worst = UINT64_MAX;
      return;
    }
    for (std::size_t i = 0; i < gp.size(); ++i) worst = std::max(worst, ulp_distance(gp[i], sp[i]));
    for (std::size_t i = 0; i < g.system.theta0.size(); ++i) {
      worst = std::max(worst, ulp_distance(g.system.theta0[i], s.system.theta0[i]));
    }
    ++configs;
  };
  for (int i = 0; i < 12; ++i) {
    const double a = rng.uniform(0.1, 3);
    const double b = rng.uniform(0.1, 3);
    const double c = rng.uniform(0.1, 3);
    const double x0 = rng.uniform(0, 2);
    const std::size_t n = rng.integer(1, 20);
    const HawkesSpec h{a, b, c, x0};
    compare(build_generic(to_generic(h), n), build_hawkes(h, n));
    const ShotNoiseSpec s{a, c, JumpMomentSpec::lognormal(rng.uniform(-1, 1), rng.uniform(0, 1)), x0};
    compare(build_generic(to_generic(s), n), build_shot_noise(s, n));
    const ItoSpec ito{a - 1.5, b - 1.5, c, static_cast<double>(i % 3), x0};
    compare(build_generic(to_generic(ito), n), build_ito(ito, n));
    const GrowthCollapseSpec g{a, b, x0, i % 2 ? JumpMomentSpec::uniform() : JumpMomentSpec::exponential(c + 1)};
    compare(build_generic(to_generic(g), n), build_growth_collapse(g, n));
    const EphemeralSpec e{a, b, c, std::floor(x0)};
    compare(build_generic(to_generic(e), n), build_ephemeral(e, n));
  }
  o.pass = configs >= 50 && worst <= 1;
  o.detail = std::to_string(configs) + " configurations, worst " + std::to_string(worst) + " ulp";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 Hawkes Euler error and decade scaling", hawkes_scaling},
      {"2 decade scaling on shot noise, CIR, growth-collapse, ephemeral", decade_scaling},
      {"3 closed form vs Euler timing at n=100", performance},
      {"4 growth-collapse stationary formula", growth_collapse_formula},
      {"5 stationary means", stationary_means},
      {"6 ODE residual of the transient solution", ode_residuals},
      {"7 Monte Carlo cross-validation", monte_carlo},
      {"8 core algebra on random instances", core_algebra},
      {"9 generic builder equivalence", generic_equivalence},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
