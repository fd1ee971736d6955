#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matryoshka/matryoshkan_matrix.hpp"

namespace matryoshka {

/// Linear moment system d/dt s(t) = theta * s(t) + theta0, where
/// s_k(t) = E[X_t^k]. Row k of `theta` couples moment k to moments <= k.
struct CoefficientSystem {
  MatryoshkanMatrix theta;
  std::vector<double> theta0;

  CoefficientSystem() = default;
  /// Throws InvalidDimension when theta0 does not match theta's order.
  CoefficientSystem(MatryoshkanMatrix theta, std::vector<double> theta0);

  std::size_t order() const noexcept { return theta.order(); }
  /// The nested sub-system for moments 1..k.
  CoefficientSystem leading(std::size_t k) const;

  friend bool operator==(const CoefficientSystem&, const CoefficientSystem&) = default;
};

/// Initial state x0 together with (x0, x0^2, ..., x0^n).
struct InitialMomentVector {
  double x0 = 0.0;
  std::vector<double> powers;

  static InitialMomentVector from_value(double x0, std::size_t order);
  std::size_t order() const noexcept { return powers.size(); }

  friend bool operator==(const InitialMomentVector&, const InitialMomentVector&) = default;
};

/// E[X^k], k = 1..n, at a time point or at stationarity (time == nullopt).
struct MomentVector {
  std::optional<double> time;
  std::vector<double> values;

  bool stationary() const noexcept { return !time.has_value(); }
  std::size_t order() const noexcept { return values.size(); }
};

/// s(t) = e^{theta t} s(0) - theta^{-1} (I - e^{theta t}) theta0, with one
/// exponential evaluation at the target time. The shift enters as an extra
/// rate-0 state, e^{At} (1, s(0)) with A = [[0, 0], [theta0, theta]].
MomentVector transient_vector(const CoefficientSystem& system, const InitialMomentVector& init,
                              double t);

/// transient_vector carried in long double. Reference for error measurements
/// that must resolve differences below one double ulp.
std::vector<long double> transient_vector_extended(const CoefficientSystem& system,
                                                   const InitialMomentVector& init, double t);

/// E[X_t^n] from the four-term scalar formula built on the order n-1 blocks.
/// For n = 1 the two matrix terms are empty and contribute zero.
double transient_scalar(const CoefficientSystem& system, const InitialMomentVector& init,
                        double t, std::size_t n);

/// Solves 0 = theta s + theta0 by forward substitution.
MomentVector steady_vector(const CoefficientSystem& system);

/// (1/theta_nn) (theta_n theta_{n-1}^{-1} theta0_{n-1} - theta0_n), using the
/// nested inverse of the leading block.
double steady_nth(const CoefficientSystem& system, std::size_t n);

/// Bottom-up recursion E[X^{n+1}] = -(theta_{n+1} s_n + theta0_{n+1}) / theta_{n+1,n+1}.
MomentVector steady_recursive(const CoefficientSystem& system);

struct Diagnostics {
  bool triangular = true;
  bool shape_ok = true;
  bool finite = true;
  bool singular = false;
  bool distinct = true;
  bool stationary = true;
  std::vector<std::size_t> zero_diagonals;
  std::vector<std::size_t> nonnegative_diagonals;
  std::vector<std::pair<std::size_t, std::size_t>> coincident_pairs;
  /// Smallest moment order (1-based) whose stationary magnitude exceeds 1e300.
  std::optional<std::size_t> predicted_overflow_order;
  std::vector<std::string> warnings;

  /// One-line report, e.g. "stationary: yes" or "stationary: no; singular".
  std::string summary() const;
};

Diagnostics validate(const CoefficientSystem& system);

/// Magnitude beyond which results are reported as Overflow.
inline constexpr double kOverflowThreshold = 1e300;

}  // namespace matryoshka
