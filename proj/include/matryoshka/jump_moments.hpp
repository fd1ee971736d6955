#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace matryoshka {

/// Moment sequence E[J^k] of a jump, collapse or mark distribution.
class JumpMomentSpec {
 public:
  enum class Kind { Deterministic, Exponential, LogNormal, Uniform, Explicit };

  static JumpMomentSpec deterministic(double value);
  static JumpMomentSpec exponential(double rate);
  static JumpMomentSpec lognormal(double log_mean, double log_sd);
  static JumpMomentSpec uniform();
  static JumpMomentSpec explicit_moments(std::vector<double> moments);

  /// Parses descriptors such as "deterministic:1", "exponential:2",
  /// "lognormal:0,1", "uniform", "explicit:1,2,6". Throws InvalidInput.
  static JumpMomentSpec parse(const std::string& descriptor);

  Kind kind() const noexcept { return kind_; }
  double first() const noexcept { return a_; }
  double second() const noexcept { return b_; }

  /// E[J^1], ..., E[J^n]. Throws InsufficientMoments for short Explicit lists.
  std::vector<double> moments(std::size_t n) const;

  /// E[J^{k+1}] E[J^{k-1}] >= E[J^k]^2 (with E[J^0] = 1) and positivity for k <= n.
  bool log_convex(std::size_t n) const;

  std::string describe() const;

  friend bool operator==(const JumpMomentSpec&, const JumpMomentSpec&) = default;

 private:
  JumpMomentSpec(Kind kind, double a, double b, std::vector<double> explicit_values = {});

  Kind kind_ = Kind::Deterministic;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> explicit_;
};

/// a^1, ..., a^n by repeated multiplication. Shared by every builder so that
/// equal inputs produce bit-identical coefficients.
std::vector<double> power_sequence(double a, std::size_t n);

/// Row-major (n+1) x (n+1) table of C(i, j) built by Pascal's rule in double.
/// Entries are exact integers for i <= 56.
class BinomialTable {
 public:
  explicit BinomialTable(std::size_t max_n);
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return j > i ? 0.0 : values_[i * (max_n_ + 1) + j];
  }
  std::size_t max_n() const noexcept { return max_n_; }

  static constexpr std::size_t kExactLimit = 56;

 private:
  std::size_t max_n_;
  std::vector<double> values_;
};

}  // namespace matryoshka
