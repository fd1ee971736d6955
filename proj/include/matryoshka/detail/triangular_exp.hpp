#pragma once

// Scalar-generic kernels behind NestedExponential and exp_series. The double
// instantiation backs the public API; long double backs the extended-precision
// reference used when measuring Euler errors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matryoshka/error.hpp"

namespace matryoshka {
bool coincident(double a, double b) noexcept;
}  // namespace matryoshka

namespace matryoshka::detail {

template <class T>
class Packed {
 public:
  Packed() = default;
  explicit Packed(std::size_t order) : order_(order), a_(offset(order), T(0)) {}
  Packed(std::size_t order, std::vector<T> entries) : order_(order), a_(std::move(entries)) {}

  static Packed identity(std::size_t order) {
    Packed p(order);
    for (std::size_t k = 0; k < order; ++k) p.a_[offset(k) + k] = T(1);
    return p;
  }

  std::size_t order() const noexcept { return order_; }
  T operator()(std::size_t i, std::size_t j) const noexcept {
    return j > i ? T(0) : a_[offset(i) + j];
  }
  T& at(std::size_t i, std::size_t j) noexcept { return a_[offset(i) + j]; }
  T diag(std::size_t k) const noexcept { return a_[offset(k) + k]; }
  std::span<const T> row(std::size_t k) const noexcept { return {a_.data() + offset(k), k}; }
  const std::vector<T>& entries() const noexcept { return a_; }
  std::vector<T>& entries() noexcept { return a_; }

  void append_row(std::span<const T> row, T diag) {
    a_.insert(a_.end(), row.begin(), row.end());
    a_.push_back(diag);
    ++order_;
  }

  static constexpr std::size_t offset(std::size_t row) noexcept { return row * (row + 1) / 2; }

 private:
  std::size_t order_ = 0;
  std::vector<T> a_;
};

template <class T>
void require_finite(T value, const char* op, std::size_t row) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::Overflow,
                std::string(op) + ": non-finite value in row " + std::to_string(row), row);
  }
}

template <class T>
Packed<T> multiply(const Packed<T>& x, const Packed<T>& y) {
  const std::size_t n = x.order();
  Packed<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xr = x.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      T acc = x.diag(i) * y(i, j);
      for (std::size_t k = j; k < i; ++k) acc += xr[k] * y(k, j);
      out.at(i, j) = acc;
    }
  }
  return out;
}

// Scaling and squaring of a truncated Taylor series, after shifting the
// diagonal to be nonnegative. Diagonal and first subdiagonal are reset from
// closed forms after every squaring.
template <class T>
Packed<T> series_exp(const Packed<T>& m, T t) {
  const std::size_t n = m.order();
  T sigma = 0;
  for (std::size_t k = 0; k < n; ++k) sigma = std::max(sigma, -m.diag(k));
  Packed<T> b = m;
  for (std::size_t k = 0; k < n; ++k) b.at(k, k) = m.diag(k) + sigma;

  T norm = 0;  // max absolute column sum of B t
  for (std::size_t j = 0; j < n; ++j) {
    T col = 0;
    for (std::size_t i = j; i < n; ++i) col += std::abs(b(i, j) * t);
    norm = std::max(norm, col);
  }
  if (!std::isfinite(norm)) {
    throw Error(ErrorKind::Overflow, "exp: non-finite generator", 0);
  }
  int squarings = 0;
  if (norm > T(0.5)) squarings = static_cast<int>(std::ceil(std::log2(norm / T(0.5))));
  const T h = std::ldexp(t, -squarings);
  for (T& v : b.entries()) v *= h;

  const T eps = std::numeric_limits<T>::epsilon() / 2;
  Packed<T> sum = Packed<T>::identity(n);
  Packed<T> term = sum;
  // Entry (i, j) first appears in term i - j, so convergence is tested entrywise.
  const int max_terms = static_cast<int>(n) + 80;
  for (int k = 1; k <= max_terms; ++k) {
    term = multiply(term, b);
    for (T& v : term.entries()) v /= T(k);
    bool converged = k >= static_cast<int>(n);
    auto& s = sum.entries();
    const auto& tp = term.entries();
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] += tp[i];
      converged = converged && std::abs(tp[i]) <= eps * std::abs(s[i]);
    }
    if (converged) break;
  }
  const T shrink = std::exp(-sigma * h);
  for (T& v : sum.entries()) v *= shrink;

  auto restore = [&](T tau) {
    for (std::size_t k = 0; k < n; ++k) sum.at(k, k) = std::exp(m.diag(k) * tau);
    for (std::size_t k = 1; k < n; ++k) {
      const T a = m.diag(k - 1);
      const T c = m.diag(k);
      const T x = (c - a) * tau / 2;
      const T divided = std::abs(x) > T(0.5)
                            ? (std::exp(c * tau) - std::exp(a * tau)) / (c - a)
                            : tau * std::exp((a + c) * tau / 2) * (x == 0 ? T(1) : std::sinh(x) / x);
      sum.at(k, k - 1) = m(k, k - 1) * divided;
    }
  };
  restore(h);
  for (int k = 0; k < squarings; ++k) {
    sum = multiply(sum, sum);
    restore(std::ldexp(h, k + 1));
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (T v : sum.row(r)) require_finite(v, "exp", r);
    require_finite(sum.diag(r), "exp", r);
  }
  return sum;
}

// Nested resolvent recursion with a running error estimate; rows whose
// estimate exceeds `tolerance` come from series_exp instead.
template <class T>
class NestedExp {
 public:
  NestedExp(T t, T tolerance) : time_(t), tolerance_(tolerance) {}

  void extend(std::span<const T> row, T diag, const Packed<T>* whole) {
    const std::size_t n = generator_.order();
    if (row.size() != n) {
      throw Error(ErrorKind::InvalidDimension, "exp: row length mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (coincident(static_cast<double>(generator_.diag(i)), static_cast<double>(diag))) {
        throw Error(ErrorKind::DegenerateSpectrum,
                    "exp: diagonal entry " + std::to_string(n) + " coincides with entry " +
                        std::to_string(i),
                    n);
      }
    }
    const T e = std::exp(diag * time_);
    require_finite(e, "exp", n);

    // y = m_n (M_{n-1} - m_nn I)^{-1} by back substitution over columns.
    std::vector<T> y(n);
    for (std::size_t jj = n; jj-- > 0;) {
      T acc = row[jj];
      for (std::size_t i = jj + 1; i < n; ++i) acc -= y[i] * generator_(i, jj);
      y[jj] = acc / (generator_.diag(jj) - diag);
    }
    // bottom = y (e^{M_{n-1} t} - e^{m_nn t} I)
    std::vector<T> bottom(n, T(0));
    T size = 0;
    T spread = 0;
    for (std::size_t j = 0; j < n; ++j) {
      T acc = -y[j] * e;
      T mag = std::abs(acc);
      for (std::size_t i = j; i < n; ++i) {
        const T term = y[i] * value_(i, j);
        acc += term;
        mag += std::abs(term);
      }
      bottom[j] = acc;
      size += std::abs(acc);
      spread += mag;
    }

    const T u = std::numeric_limits<T>::epsilon() / 2;
    T abs_error = static_cast<T>(n + 1) * u * spread;
    for (std::size_t i = 0; i < n; ++i) abs_error += std::abs(y[i]) * row_abs_error_[i];
    T row_error = 0;
    if (abs_error > 0) row_error = size > 0 ? abs_error / size : std::numeric_limits<T>::infinity();

    if (!(row_error <= tolerance_) || !std::isfinite(spread)) {
      if (whole != nullptr && whole->order() > n) {
        if (!whole_series_) whole_series_ = series_exp(*whole, time_);
        bottom.assign(whole_series_->row(n).begin(), whole_series_->row(n).end());
      } else {
        Packed<T> grown = generator_;
        grown.append_row(row, diag);
        const auto full = series_exp(grown, time_);
        bottom.assign(full.row(n).begin(), full.row(n).end());
      }
      size = 0;
      for (T v : bottom) size += std::abs(v);
      row_error = static_cast<T>(4 * (n + 1)) * u;
      abs_error = row_error * size;
      ++series_rows_;
    }
    for (T v : bottom) require_finite(v, "exp", n);
    error_ = std::max(error_, row_error);
    row_abs_error_.push_back(abs_error + u * std::abs(e));
    generator_.append_row(row, diag);
    value_.append_row(bottom, e);
  }

  T time() const noexcept { return time_; }
  const Packed<T>& generator() const noexcept { return generator_; }
  const Packed<T>& value() const noexcept { return value_; }
  T error_estimate() const noexcept { return error_; }
  std::size_t series_rows() const noexcept { return series_rows_; }

 private:
  T time_;
  T tolerance_;
  Packed<T> generator_;
  Packed<T> value_;
  T error_ = 0;
  // Absolute error estimate of each stored row, summed over its entries.
  std::vector<T> row_abs_error_;
  std::size_t series_rows_ = 0;
  std::optional<Packed<T>> whole_series_;
};

}  // namespace matryoshka::detail
