#include "matryoshka/moment_engine.hpp"

#include <cmath>
#include <sstream>

namespace matryoshka {

namespace {

void check_result(std::span<const double> values, const char* op) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k]) || std::abs(values[k]) > kOverflowThreshold) {
      throw Error(ErrorKind::Overflow,
                  std::string(op) + ": moment " + std::to_string(k + 1) + " exceeds 1e300", k);
    }
  }
}

void require_transient_preconditions(const CoefficientSystem& system,
                                     const InitialMomentVector& init, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::InvalidInput, "time must be finite and nonnegative");
  }
  if (init.order() < system.order()) {
    throw Error(ErrorKind::InvalidDimension, "initial moment vector shorter than system order");
  }
  for (std::size_t k = 0; k < system.order(); ++k) {
    if (system.theta.diag(k) == 0.0) {
      throw Error(ErrorKind::SingularMatrix,
                  "theta has a zero diagonal entry at moment " + std::to_string(k + 1), k);
    }
  }
}

void require_stable(const CoefficientSystem& system, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    if (!(system.theta.diag(k) < 0.0)) {
      throw Error(ErrorKind::NonStationary,
                  "diagonal entry for moment " + std::to_string(k + 1) + " is not negative", k);
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

CoefficientSystem::CoefficientSystem(MatryoshkanMatrix theta_in, std::vector<double> theta0_in)
    : theta(std::move(theta_in)), theta0(std::move(theta0_in)) {
  if (theta0.size() != theta.order()) {
    throw Error(ErrorKind::InvalidDimension,
                "shift vector has " + std::to_string(theta0.size()) + " entries for order " +
                    std::to_string(theta.order()));
  }
}

CoefficientSystem CoefficientSystem::leading(std::size_t k) const {
  return CoefficientSystem(theta.leading(k),
                           std::vector<double>(theta0.begin(),
                                               theta0.begin() + static_cast<std::ptrdiff_t>(k)));
}

InitialMomentVector InitialMomentVector::from_value(double x0, std::size_t order) {
  InitialMomentVector init{x0, std::vector<double>(order)};
  double p = 1.0;
  for (std::size_t k = 0; k < order; ++k) {
    p *= x0;
    init.powers[k] = p;
  }
  return init;
}

namespace {

// [[0, 0], [theta0, Theta]]: the shift becomes a constant state with rate 0,
// so s(t) = e^{At} (1, x) with one exponential and no solve.
template <class T>
detail::Packed<T> augmented(const CoefficientSystem& system, std::size_t n) {
  detail::Packed<T> a(1);
  std::vector<T> row;
  for (std::size_t k = 0; k < n; ++k) {
    row.assign(1, system.theta0[k]);
    const auto r = system.theta.row(k);
    row.insert(row.end(), r.begin(), r.end());
    a.append_row(row, system.theta.diag(k));
  }
  return a;
}

template <class T>
T apply_row(const detail::Packed<T>& e, std::size_t row, std::span<const double> x) {
  const auto r = e.row(row);
  T acc = r[0];
  for (std::size_t j = 1; j < row; ++j) acc += r[j] * static_cast<T>(x[j - 1]);
  return acc + e.diag(row) * static_cast<T>(x[row - 1]);
}

template <class T>
std::vector<T> transient_values(const CoefficientSystem& system, const InitialMomentVector& init,
                                double t, T tolerance) {
  require_transient_preconditions(system, init, t);
  const std::size_t n = system.order();
  const auto a = augmented<T>(system, n);
  detail::NestedExp<T> nested(static_cast<T>(t), tolerance);
  for (std::size_t k = 0; k <= n; ++k) nested.extend(a.row(k), a.diag(k), &a);
  std::vector<T> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = apply_row(nested.value(), k + 1, init.powers);
  return s;
}

}  // namespace

MomentVector transient_vector(const CoefficientSystem& system, const InitialMomentVector& init,
                              double t) {
  auto s = transient_values<double>(system, init, t, NestedExponential::kRowTolerance);
  check_result(s, "transient_vector");
  return {t, std::move(s)};
}

std::vector<long double> transient_vector_extended(const CoefficientSystem& system,
                                                   const InitialMomentVector& init, double t) {
  auto s = transient_values<long double>(system, init, t, 1e-17L);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!std::isfinite(s[k]) || std::fabs(s[k]) > kOverflowThreshold) {
      throw Error(ErrorKind::Overflow,
                  "transient_vector: moment " + std::to_string(k + 1) + " exceeds 1e300", k);
    }
  }
  return s;
}

double transient_scalar(const CoefficientSystem& system, const InitialMomentVector& init, double t,
                        std::size_t n) {
  if (n == 0 || n > system.order()) {
    throw Error(ErrorKind::InvalidDimension, "moment order " + std::to_string(n) +
                                                 " outside 1.." + std::to_string(system.order()));
  }
  require_transient_preconditions(system.leading(n), init, t);
  // Exponential of the leading block, then a single resolvent step for row n:
  // x_n e^{ct} + (theta0_n, theta_n)(A_{n-1} - cI)^{-1}(e^{A_{n-1} t} - e^{ct} I)(1, x).
  const auto a = augmented<double>(system, n);
  detail::NestedExp<double> nested(t, NestedExponential::kRowTolerance);
  for (std::size_t k = 0; k < n; ++k) nested.extend(a.row(k), a.diag(k), &a);
  nested.extend(a.row(n), a.diag(n), nullptr);
  const double value = apply_row(nested.value(), n, init.powers);
  check_result(std::span<const double>(&value, 1), "transient_scalar");
  return value;
}

MomentVector steady_vector(const CoefficientSystem& system) {
  require_stable(system, system.order());
  std::vector<double> rhs(system.theta0);
  for (double& v : rhs) v = -v;
  auto s = solve_lower(system.theta, rhs);
  check_result(s, "steady_vector");
  return {std::nullopt, std::move(s)};
}

double steady_nth(const CoefficientSystem& system, std::size_t n) {
  if (n == 0 || n > system.order()) {
    throw Error(ErrorKind::InvalidDimension, "moment order " + std::to_string(n) +
                                                 " outside 1.." + std::to_string(system.order()));
  }
  require_stable(system, n);
  const std::size_t m = n - 1;
  const double c = system.theta.diag(m);
  double value = -system.theta0[m] / c;
  if (m > 0) {
    const NestedInverse inv(system.theta.leading(m));
    const auto z = multiply(inv.value(), std::span<const double>(system.theta0.data(), m));
    value = (dot(system.theta.row(m), z) - system.theta0[m]) / c;
  }
  check_result(std::span<const double>(&value, 1), "steady_nth");
  return value;
}

MomentVector steady_recursive(const CoefficientSystem& system) {
  require_stable(system, system.order());
  std::vector<double> s;
  s.reserve(system.order());
  for (std::size_t k = 0; k < system.order(); ++k) {
    const double next = -(dot(system.theta.row(k), s) + system.theta0[k]) / system.theta.diag(k);
    s.push_back(next);
  }
  check_result(s, "steady_recursive");
  return {std::nullopt, std::move(s)};
}

std::string Diagnostics::summary() const {
  std::ostringstream os;
  os << "stationary: " << (stationary ? "yes" : "no");
  if (singular) os << "; singular";
  if (!distinct) os << "; coincident diagonals";
  if (!finite) os << "; non-finite coefficients";
  if (!shape_ok) os << "; shift vector length mismatch";
  if (predicted_overflow_order) os << "; overflow at order " << *predicted_overflow_order;
  return os.str();
}

Diagnostics validate(const CoefficientSystem& system) {
  Diagnostics d;
  const auto& theta = system.theta;
  const std::size_t n = theta.order();
  d.shape_ok = system.theta0.size() == n;
  if (!d.shape_ok) d.warnings.push_back("shift vector length does not match order");

  for (double v : theta.packed()) d.finite = d.finite && std::isfinite(v);
  for (double v : system.theta0) d.finite = d.finite && std::isfinite(v);
  if (!d.finite) d.warnings.push_back("non-finite coefficient");

  for (std::size_t k = 0; k < n; ++k) {
    const double c = theta.diag(k);
    if (c == 0.0) d.zero_diagonals.push_back(k);
    if (!(c < 0.0)) d.nonnegative_diagonals.push_back(k);
    for (std::size_t i = 0; i < k; ++i) {
      if (coincident(theta.diag(i), c)) d.coincident_pairs.emplace_back(i, k);
    }
  }
  d.singular = !d.zero_diagonals.empty();
  d.distinct = d.coincident_pairs.empty();
  d.stationary = d.nonnegative_diagonals.empty() && d.shape_ok && d.finite;
  if (d.singular) {
    d.warnings.push_back("SingularMatrix: zero diagonal entry at moment " +
                         std::to_string(d.zero_diagonals.front() + 1));
  }
  if (!d.distinct) {
    d.warnings.push_back("DegenerateSpectrum: diagonals " +
                         std::to_string(d.coincident_pairs.front().first + 1) + " and " +
                         std::to_string(d.coincident_pairs.front().second + 1) + " coincide");
  }

  if (d.stationary) {
    // Extended-range replay of the stationary recursion.
    std::vector<long double> s;
    for (std::size_t k = 0; k < n; ++k) {
      long double acc = system.theta0[k];
      const auto r = theta.row(k);
      for (std::size_t j = 0; j < k; ++j) acc += static_cast<long double>(r[j]) * s[j];
      s.push_back(-acc / theta.diag(k));
      if (std::fabs(s.back()) > static_cast<long double>(kOverflowThreshold)) {
        d.predicted_overflow_order = k + 1;
        d.warnings.push_back("stationary moment " + std::to_string(k + 1) + " exceeds 1e300");
        break;
      }
    }
  }
  return d;
}

}  // namespace matryoshka
