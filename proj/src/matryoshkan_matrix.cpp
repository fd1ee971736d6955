#include "matryoshka/matryoshkan_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace matryoshka {

namespace {

void require_same_order(const MatryoshkanMatrix& x, const MatryoshkanMatrix& y, const char* op) {
  if (x.order() != y.order()) {
    throw Error(ErrorKind::InvalidDimension,
                std::string(op) + ": orders " + std::to_string(x.order()) + " and " +
                    std::to_string(y.order()) + " differ");
  }
}

void require_finite(double value, const char* op, std::size_t row) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::Overflow, std::string(op) + ": non-finite value in row " +
                                         std::to_string(row),
                row);
  }
}

// Index of an earlier diagonal entry coincident with `value`, if any.
std::optional<std::size_t> find_coincident(const MatryoshkanMatrix& m, double value) {
  for (std::size_t i = 0; i < m.order(); ++i) {
    if (coincident(m.diag(i), value)) return i;
  }
  return std::nullopt;
}

void require_distinct(const MatryoshkanMatrix& m, double value, const char* op) {
  if (auto hit = find_coincident(m, value)) {
    throw Error(ErrorKind::DegenerateSpectrum,
                std::string(op) + ": diagonal entry " + std::to_string(m.order()) +
                    " coincides with entry " + std::to_string(*hit),
                m.order());
  }
}

}  // namespace

bool coincident(double a, double b) noexcept {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kDistinctTolerance * scale;
}

MatryoshkanMatrix::MatryoshkanMatrix(std::size_t order)
    : order_(order), entries_(offset(order), 0.0) {}

MatryoshkanMatrix MatryoshkanMatrix::identity(std::size_t order) {
  MatryoshkanMatrix m(order);
  for (std::size_t k = 0; k < order; ++k) m.entries_[offset(k) + k] = 1.0;
  return m;
}

MatryoshkanMatrix MatryoshkanMatrix::diagonal(std::span<const double> values) {
  MatryoshkanMatrix m(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) m.entries_[offset(k) + k] = values[k];
  return m;
}

MatryoshkanMatrix MatryoshkanMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  MatryoshkanMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i];
    if (r.size() != n && r.size() != i + 1) {
      throw Error(ErrorKind::InvalidDimension,
                  "row " + std::to_string(i) + " has " + std::to_string(r.size()) +
                      " entries; expected " + std::to_string(i + 1) + " or " + std::to_string(n));
    }
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      if (r[j] != 0.0) {
        throw Error(ErrorKind::InvalidInput, "entry (" + std::to_string(i) + ", " +
                                                 std::to_string(j) + ") above the diagonal is nonzero");
      }
    }
    std::copy_n(r.begin(), i + 1, m.entries_.begin() + static_cast<std::ptrdiff_t>(offset(i)));
  }
  return m;
}

MatryoshkanMatrix MatryoshkanMatrix::from_packed(std::vector<double> packed) {
  std::size_t n = 0;
  while (offset(n) < packed.size()) ++n;
  if (offset(n) != packed.size()) {
    throw Error(ErrorKind::InvalidDimension,
                "packed length " + std::to_string(packed.size()) + " is not triangular");
  }
  MatryoshkanMatrix m;
  m.order_ = n;
  m.entries_ = std::move(packed);
  return m;
}

void MatryoshkanMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= order_ || j > i) {
    throw Error(ErrorKind::InvalidDimension, "set(" + std::to_string(i) + ", " +
                                                 std::to_string(j) + ") outside the lower triangle");
  }
  entries_[offset(i) + j] = value;
}

void MatryoshkanMatrix::append_row(std::span<const double> row, double diag) {
  if (row.size() != order_) {
    throw Error(ErrorKind::InvalidDimension, "extend: row has " + std::to_string(row.size()) +
                                                 " entries; expected " + std::to_string(order_));
  }
  entries_.insert(entries_.end(), row.begin(), row.end());
  entries_.push_back(diag);
  ++order_;
}

MatryoshkanMatrix MatryoshkanMatrix::leading(std::size_t k) const {
  if (k > order_) {
    throw Error(ErrorKind::InvalidDimension, "leading block " + std::to_string(k) +
                                                 " exceeds order " + std::to_string(order_));
  }
  return from_packed(std::vector<double>(entries_.begin(),
                                         entries_.begin() + static_cast<std::ptrdiff_t>(offset(k))));
}

std::vector<double> MatryoshkanMatrix::diagonal_values() const {
  std::vector<double> d(order_);
  for (std::size_t k = 0; k < order_; ++k) d[k] = diag(k);
  return d;
}

std::vector<double> MatryoshkanMatrix::dense() const {
  std::vector<double> out(order_ * order_, 0.0);
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) out[i * order_ + j] = entries_[offset(i) + j];
  }
  return out;
}

bool MatryoshkanMatrix::invertible() const noexcept {
  for (std::size_t k = 0; k < order_; ++k) {
    if (diag(k) == 0.0) return false;
  }
  return true;
}

bool MatryoshkanMatrix::distinct_spectrum() const noexcept {
  return !first_coincident_pair().has_value();
}

std::optional<std::pair<std::size_t, std::size_t>> MatryoshkanMatrix::first_coincident_pair()
    const noexcept {
  for (std::size_t j = 1; j < order_; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (coincident(diag(i), diag(j))) return std::pair{i, j};
    }
  }
  return std::nullopt;
}

MatryoshkanMatrix extend(const MatryoshkanMatrix& base, std::span<const double> row, double diag) {
  MatryoshkanMatrix out = base;
  out.append_row(row, diag);
  return out;
}

MatryoshkanMatrix add(const MatryoshkanMatrix& x, const MatryoshkanMatrix& y) {
  require_same_order(x, y, "add");
  std::vector<double> sum(x.packed().begin(), x.packed().end());
  const auto other = y.packed();
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += other[i];
  return MatryoshkanMatrix::from_packed(std::move(sum));
}

MatryoshkanMatrix scale(const MatryoshkanMatrix& x, double factor) {
  std::vector<double> out(x.packed().begin(), x.packed().end());
  for (double& v : out) v *= factor;
  return MatryoshkanMatrix::from_packed(std::move(out));
}

MatryoshkanMatrix multiply(const MatryoshkanMatrix& x, const MatryoshkanMatrix& y) {
  require_same_order(x, y, "multiply");
  const std::size_t n = x.order();
  MatryoshkanMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = j; k <= i; ++k) acc += x(i, k) * y(k, j);
      out.set(i, j, acc);
    }
  }
  return out;
}

std::vector<double> multiply(const MatryoshkanMatrix& x, std::span<const double> v) {
  if (v.size() != x.order()) {
    throw Error(ErrorKind::InvalidDimension, "matrix-vector product: vector length " +
                                                 std::to_string(v.size()) + " vs order " +
                                                 std::to_string(x.order()));
  }
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto r = x.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += r[j] * v[j];
    out[i] = acc + x.diag(i) * v[i];
  }
  return out;
}

std::vector<double> solve_lower(const MatryoshkanMatrix& m, std::span<const double> b,
                                double shift) {
  if (b.size() > m.order()) {
    throw Error(ErrorKind::InvalidDimension, "solve_lower: right-hand side longer than order");
  }
  std::vector<double> x(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double pivot = m.diag(i) - shift;
    if (pivot == 0.0) {
      throw Error(ErrorKind::SingularMatrix,
                  "zero pivot at diagonal " + std::to_string(i), i);
    }
    const auto r = m.row(i);
    double acc = b[i];
    for (std::size_t j = 0; j < i; ++j) acc -= r[j] * x[j];
    x[i] = acc / pivot;
  }
  return x;
}

std::vector<double> solve_row(const MatryoshkanMatrix& m, std::span<const double> r,
                              double shift) {
  const std::size_t k = r.size();
  if (k > m.order()) {
    throw Error(ErrorKind::InvalidDimension, "solve_row: row longer than order");
  }
  std::vector<double> y(k);
  for (std::size_t jj = k; jj-- > 0;) {
    const double pivot = m.diag(jj) - shift;
    if (pivot == 0.0) {
      throw Error(ErrorKind::SingularMatrix,
                  "zero pivot at diagonal " + std::to_string(jj), jj);
    }
    double acc = r[jj];
    for (std::size_t i = jj + 1; i < k; ++i) acc -= y[i] * m(i, jj);
    y[jj] = acc / pivot;
  }
  return y;
}

NestedInverse::NestedInverse(const MatryoshkanMatrix& m) {
  for (std::size_t k = 0; k < m.order(); ++k) extend(m.row(k), m.diag(k));
}

void NestedInverse::extend(std::span<const double> row, double diag) {
  const std::size_t n = generator_.order();
  if (row.size() != n) {
    throw Error(ErrorKind::InvalidDimension, "inverse: row length mismatch");
  }
  if (diag == 0.0) {
    throw Error(ErrorKind::SingularMatrix, "zero diagonal entry " + std::to_string(n), n);
  }
  // Bottom row: -(1/m_nn) m_n W_{n-1}, with W_{n-1} the cached inverse.
  std::vector<double> bottom(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = j; i < n; ++i) acc += row[i] * value_(i, j);
    bottom[j] = -acc / diag;
    require_finite(bottom[j], "inverse", n);
  }
  generator_.append_row(row, diag);
  value_.append_row(bottom, 1.0 / diag);
}

MatryoshkanMatrix inverse(const MatryoshkanMatrix& m) { return NestedInverse(m).value(); }

MatryoshkanMatrix power_by_multiplication(const MatryoshkanMatrix& m, unsigned k) {
  MatryoshkanMatrix out = MatryoshkanMatrix::identity(m.order());
  for (unsigned i = 0; i < k; ++i) out = multiply(out, m);
  return out;
}

MatryoshkanMatrix power(const MatryoshkanMatrix& m, unsigned k) {
  MatryoshkanMatrix source;
  MatryoshkanMatrix out;
  for (std::size_t n = 0; n < m.order(); ++n) {
    const double c = m.diag(n);
    require_distinct(source, c, "power");
    const double ck = std::pow(c, static_cast<double>(k));
    require_finite(ck, "power", n);
    const auto y = solve_row(source, m.row(n), c);
    std::vector<double> bottom(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = -y[j] * ck;
      for (std::size_t i = j; i < n; ++i) acc += y[i] * out(i, j);
      require_finite(acc, "power", n);
      bottom[j] = acc;
    }
    source.append_row(m.row(n), c);
    out.append_row(bottom, ck);
  }
  return out;
}

NestedExponential::NestedExponential(const MatryoshkanMatrix& m, double t)
    : impl_(t, kRowTolerance) {
  const detail::Packed<double> whole(m.order(),
                                     std::vector<double>(m.packed().begin(), m.packed().end()));
  for (std::size_t k = 0; k < m.order(); ++k) {
    impl_.extend(m.row(k), m.diag(k), &whole);
    sync();
  }
}

void NestedExponential::extend(std::span<const double> row, double diag) {
  impl_.extend(row, diag, nullptr);
  sync();
}

void NestedExponential::sync() {
  const std::size_t n = impl_.value().order() - 1;
  generator_.append_row(impl_.generator().row(n), impl_.generator().diag(n));
  value_.append_row(impl_.value().row(n), impl_.value().diag(n));
}

MatryoshkanMatrix exp_scaled(const MatryoshkanMatrix& m, double t) {
  return NestedExponential(m, t).value();
}

MatryoshkanMatrix exp_series(const MatryoshkanMatrix& m, double t) {
  const detail::Packed<double> p(m.order(), std::vector<double>(m.packed().begin(), m.packed().end()));
  return MatryoshkanMatrix::from_packed(detail::series_exp(p, t).entries());
}

EigenPair eigendecompose(const MatryoshkanMatrix& m) {
  EigenPair out;
  MatryoshkanMatrix seen;
  for (std::size_t n = 0; n < m.order(); ++n) {
    const double c = m.diag(n);
    require_distinct(seen, c, "eigendecompose");
    // u = m_n U_{n-1} (D_{n-1} - m_nn I)^{-1}
    const auto r = m.row(n);
    std::vector<double> bottom(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = j; i < n; ++i) acc += r[i] * out.vectors(i, j);
      bottom[j] = acc / (out.values[j] - c);
      require_finite(bottom[j], "eigendecompose", n);
    }
    seen.append_row(r, c);
    out.vectors.append_row(bottom, 1.0);
    out.values.push_back(c);
  }
  return out;
}

}  // namespace matryoshka
