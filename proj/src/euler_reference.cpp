#include "matryoshka/euler_reference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace matryoshka {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::size_t EulerConfig::steps() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorKind::InvalidInput, "Euler step must be positive");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorKind::InvalidInput, "Euler horizon must be finite and nonnegative");
  }
  return static_cast<std::size_t>(std::llround(horizon / step));
}

double EulerConfig::remainder() const {
  return horizon - static_cast<double>(steps()) * step;
}

namespace {

// Compensated Euler iteration in long double; returns the corrected state.
std::vector<long double> iterate(const CoefficientSystem& system, const InitialMomentVector& init,
                                 const EulerConfig& cfg) {
  const std::size_t steps = cfg.steps();
  const std::size_t n = system.order();
  if (init.order() < n) {
    throw Error(ErrorKind::InvalidDimension, "initial moment vector shorter than system order");
  }
  const long double h = cfg.step;
  const auto& theta = system.theta;
  std::vector<long double> s(init.powers.begin(),
                             init.powers.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<long double> carry(n, 0.0L);

  for (std::size_t step = 0; step < steps; ++step) {
    // Row k only reads rows <= k, so updating from the bottom keeps the
    // previous iterate intact for the rows still to be processed.
    for (std::size_t k = n; k-- > 0;) {
      const auto r = theta.row(k);
      long double rate = system.theta0[k];
      for (std::size_t j = 0; j < k; ++j) rate += r[j] * (s[j] - carry[j]);
      rate += theta.diag(k) * (s[k] - carry[k]);
      const long double y = h * rate - carry[k];
      const long double sum = s[k] + y;
      carry[k] = (sum - s[k]) - y;
      s[k] = sum;
    }
    if (!std::isfinite(s[n - 1]) || std::fabs(s[n - 1]) > kOverflowThreshold) {
      throw Error(ErrorKind::Overflow, "Euler iterate diverged after step " +
                                           std::to_string(step + 1) + "; step too large",
                  n - 1);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    s[k] -= carry[k];
    if (!std::isfinite(s[k]) || std::fabs(s[k]) > kOverflowThreshold) {
      throw Error(ErrorKind::Overflow, "Euler moment " + std::to_string(k + 1) + " exceeds 1e300",
                  k);
    }
  }
  return s;
}

}  // namespace

MomentVector euler_solve(const CoefficientSystem& system, const InitialMomentVector& init,
                         const EulerConfig& cfg) {
  const auto s = iterate(system, init, cfg);
  return {static_cast<double>(cfg.steps()) * cfg.step, std::vector<double>(s.begin(), s.end())};
}

std::vector<long double> euler_solve_extended(const CoefficientSystem& system,
                                              const InitialMomentVector& init,
                                              const EulerConfig& cfg) {
  return iterate(system, init, cfg);
}

ErrorMetrics error_metrics(const MomentVector& euler, const MomentVector& closed) {
  if (euler.order() != closed.order()) {
    throw Error(ErrorKind::InvalidDimension, "moment vectors have different orders");
  }
  ErrorMetrics out;
  for (std::size_t k = 0; k < euler.order(); ++k) {
    const double abs = std::abs(euler.values[k] - closed.values[k]);
    out.abs.push_back(abs);
    out.rel.push_back(closed.values[k] == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                              : abs / closed.values[k]);
  }
  return out;
}

ErrorMetrics error_metrics(std::span<const long double> euler,
                           std::span<const long double> closed) {
  if (euler.size() != closed.size()) {
    throw Error(ErrorKind::InvalidDimension, "moment vectors have different orders");
  }
  ErrorMetrics out;
  for (std::size_t k = 0; k < euler.size(); ++k) {
    const long double abs = std::fabs(euler[k] - closed[k]);
    out.abs.push_back(static_cast<double>(abs));
    out.rel.push_back(closed[k] == 0.0L ? std::numeric_limits<double>::quiet_NaN()
                                        : static_cast<double>(abs / closed[k]));
  }
  return out;
}

std::vector<BenchRecord> bench(const CoefficientSystem& system, const InitialMomentVector& init,
                               double t, std::size_t n, const std::vector<double>& deltas,
                               std::size_t trials) {
  if (trials == 0) throw Error(ErrorKind::InvalidInput, "trials must be at least 1");
  if (n == 0 || n > system.order()) {
    throw Error(ErrorKind::InvalidDimension, "moment order outside the system");
  }
  const auto sub = system.leading(n);
  std::vector<BenchRecord> records;

  MomentVector closed;
  std::vector<double> times;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto start = Clock::now();
    closed = transient_vector(sub, init, t);
    times.push_back(seconds_since(start));
  }
  records.push_back({"closed-form", std::nullopt, mean(times), median(times), 0.0, 0.0, n, trials});
  const auto reference = transient_vector_extended(sub, init, t);

  for (double delta : deltas) {
    const EulerConfig cfg{delta, t};
    std::vector<long double> approx;
    times.clear();
    for (std::size_t i = 0; i < trials; ++i) {
      const auto start = Clock::now();
      approx = euler_solve_extended(sub, init, cfg);
      times.push_back(seconds_since(start));
    }
    const auto err = error_metrics(approx, reference);
    records.push_back({"euler", delta, mean(times), median(times), err.abs[n - 1], err.rel[n - 1],
                       n, trials});
  }
  return records;
}

}  // namespace matryoshka
