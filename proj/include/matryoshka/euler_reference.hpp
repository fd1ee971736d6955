#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matryoshka/moment_engine.hpp"

namespace matryoshka {

struct EulerConfig {
  double step = 1e-2;
  double horizon = 0.0;

  /// round(horizon / step). Throws InvalidInput for a non-positive step.
  std::size_t steps() const;
  /// horizon - steps() * step; at most step / 2 in magnitude.
  double remainder() const;
};

/// Explicit Euler on the triangular moment system:
/// s <- s + step * (theta s + theta0), steps() times from init.powers.
/// The state is carried in long double with compensated summation so that the
/// reported error is the truncation error of the scheme, not rounding drift.
MomentVector euler_solve(const CoefficientSystem& system, const InitialMomentVector& init,
                         const EulerConfig& cfg);
/// The same iterate without the final rounding to double.
std::vector<long double> euler_solve_extended(const CoefficientSystem& system,
                                              const InitialMomentVector& init,
                                              const EulerConfig& cfg);

struct ErrorMetrics {
  std::vector<double> abs;
  /// NaN where the closed-form value is zero.
  std::vector<double> rel;
};

/// abs_k = |m_D,k - m_M,k|, rel_k = abs_k / m_M,k.
ErrorMetrics error_metrics(const MomentVector& euler, const MomentVector& closed);
ErrorMetrics error_metrics(std::span<const long double> euler, std::span<const long double> closed);

struct BenchRecord {
  std::string method;
  std::optional<double> delta;  // empty for the closed-form row
  double run_time_seconds = 0.0;
  double median_run_time_seconds = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  std::size_t order = 0;
  std::size_t trials = 0;
};

/// Times the closed-form vector and each Euler step size over `trials`
/// repetitions (construction is not timed). Errors refer to moment n and are
/// measured in long double against transient_vector_extended.
std::vector<BenchRecord> bench(const CoefficientSystem& system, const InitialMomentVector& init,
                               double t, std::size_t n, const std::vector<double>& deltas,
                               std::size_t trials);

}  // namespace matryoshka
