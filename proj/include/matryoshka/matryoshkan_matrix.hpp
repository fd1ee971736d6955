#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "matryoshka/detail/triangular_exp.hpp"
#include "matryoshka/error.hpp"

namespace matryoshka {

/// Relative tolerance under which two diagonal entries count as coincident:
/// |a - b| <= kDistinctTolerance * max(1, |a|, |b|).
inline constexpr double kDistinctTolerance = 1e-9;

bool coincident(double a, double b) noexcept;

/// Lower-triangular matrix stored as packed rows.
///
/// Row `i` (zero-based) occupies `i + 1` consecutive doubles starting at
/// offset i(i+1)/2, so the storage of every leading k x k block is a prefix
/// of the storage of the full matrix. Growing the matrix by one row is the
/// nesting step M_n = [[M_{n-1}, 0], [m_n, m_nn]].
class MatryoshkanMatrix {
 public:
  MatryoshkanMatrix() = default;
  /// Zero matrix of the given order.
  explicit MatryoshkanMatrix(std::size_t order);

  static MatryoshkanMatrix identity(std::size_t order);
  static MatryoshkanMatrix diagonal(std::span<const double> values);
  /// Accepts either square rows (upper part must be exactly zero) or ragged
  /// rows where row i holds i + 1 entries.
  static MatryoshkanMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static MatryoshkanMatrix from_packed(std::vector<double> packed);

  std::size_t order() const noexcept { return order_; }

  /// Entry (i, j), zero-based; exactly 0.0 above the diagonal.
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return j > i ? 0.0 : entries_[offset(i) + j];
  }
  double diag(std::size_t k) const noexcept { return entries_[offset(k) + k]; }
  /// Sub-diagonal part of row k: the first k entries.
  std::span<const double> row(std::size_t k) const noexcept {
    return {entries_.data() + offset(k), k};
  }
  std::span<const double> packed() const noexcept { return entries_; }

  void set(std::size_t i, std::size_t j, double value);
  /// In-place nesting step; `row.size()` must equal the current order.
  void append_row(std::span<const double> row, double diag);

  /// Leading k x k block.
  MatryoshkanMatrix leading(std::size_t k) const;
  std::vector<double> diagonal_values() const;
  /// Row-major dense copy (order * order), zeros above the diagonal.
  std::vector<double> dense() const;

  bool invertible() const noexcept;
  bool distinct_spectrum() const noexcept;
  /// First pair (i < j) of coincident diagonal entries, if any.
  std::optional<std::pair<std::size_t, std::size_t>> first_coincident_pair() const noexcept;

  friend bool operator==(const MatryoshkanMatrix&, const MatryoshkanMatrix&) = default;

  static constexpr std::size_t offset(std::size_t row) noexcept { return row * (row + 1) / 2; }

 private:
  std::size_t order_ = 0;
  std::vector<double> entries_;
};

/// Eigenvectors U (lower unitriangular) and eigenvalues D with M U = U diag(D).
struct EigenPair {
  MatryoshkanMatrix vectors;
  std::vector<double> values;
};

MatryoshkanMatrix extend(const MatryoshkanMatrix& base, std::span<const double> row, double diag);
MatryoshkanMatrix add(const MatryoshkanMatrix& x, const MatryoshkanMatrix& y);
MatryoshkanMatrix scale(const MatryoshkanMatrix& x, double factor);
MatryoshkanMatrix multiply(const MatryoshkanMatrix& x, const MatryoshkanMatrix& y);
std::vector<double> multiply(const MatryoshkanMatrix& x, std::span<const double> v);

/// Solves (M - shift I) x = b by forward substitution.
std::vector<double> solve_lower(const MatryoshkanMatrix& m, std::span<const double> b,
                                double shift = 0.0);

/// Solves the row-vector system y (M_k - shift I) = r, where M_k is the leading
/// k x k block of `m` and k = r.size(). Back substitution over columns.
std::vector<double> solve_row(const MatryoshkanMatrix& m, std::span<const double> r,
                              double shift = 0.0);

/// Inverse built row by row: bottom row -(1/m_nn) m_n M_{n-1}^{-1}, diagonal 1/m_nn.
MatryoshkanMatrix inverse(const MatryoshkanMatrix& m);

/// M^k via m_n (M_{n-1} - m_nn I)^{-1} (M_{n-1}^k - m_nn^k I).
/// Throws DegenerateSpectrum on repeated diagonals; see power_by_multiplication.
MatryoshkanMatrix power(const MatryoshkanMatrix& m, unsigned k);
MatryoshkanMatrix power_by_multiplication(const MatryoshkanMatrix& m, unsigned k);

/// e^{Mt} via the nested resolvent recursion.
MatryoshkanMatrix exp_scaled(const MatryoshkanMatrix& m, double t);

/// e^{Mt} by scaling and squaring a truncated Taylor series. No spectral
/// requirement; used for rows where the resolvent recursion cancels.
MatryoshkanMatrix exp_series(const MatryoshkanMatrix& m, double t);

EigenPair eigendecompose(const MatryoshkanMatrix& m);

/// Incrementally maintained e^{M_n t}: each extend() adds one row to both the
/// generator and its exponential in O(n^2).
///
/// Closely spaced diagonals make y = m_n (M_{n-1} - m_nn I)^{-1} large and the
/// bottom row a difference of nearly equal terms. Each row carries a running
/// relative error estimate; a row whose estimate exceeds kRowTolerance is
/// taken from exp_series instead. Earlier rows are never touched, so nesting
/// stays exact.
class NestedExponential {
 public:
  static constexpr double kRowTolerance = 1e-12;

  explicit NestedExponential(double t) : impl_(t, kRowTolerance) {}
  NestedExponential(const MatryoshkanMatrix& m, double t);

  void extend(std::span<const double> row, double diag);

  double time() const noexcept { return impl_.time(); }
  const MatryoshkanMatrix& generator() const noexcept { return generator_; }
  const MatryoshkanMatrix& value() const noexcept { return value_; }
  /// Largest relative error estimate over the rows so far.
  double error_estimate() const noexcept { return impl_.error_estimate(); }
  /// Rows that came from the series path.
  std::size_t series_rows() const noexcept { return impl_.series_rows(); }

 private:
  void sync();

  detail::NestedExp<double> impl_;
  MatryoshkanMatrix generator_;
  MatryoshkanMatrix value_;
};

/// Incrementally maintained M_n^{-1}.
class NestedInverse {
 public:
  NestedInverse() = default;
  explicit NestedInverse(const MatryoshkanMatrix& m);

  void extend(std::span<const double> row, double diag);

  const MatryoshkanMatrix& generator() const noexcept { return generator_; }
  const MatryoshkanMatrix& value() const noexcept { return value_; }

 private:
  MatryoshkanMatrix generator_;
  MatryoshkanMatrix value_;
};

}  // namespace matryoshka
