#include "matryoshka/jump_moments.hpp"

#include <cmath>
#include <sstream>
#include <string_view>

#include "matryoshka/error.hpp"

namespace matryoshka {

namespace {

std::vector<double> parse_numbers(std::string_view text, const std::string& descriptor) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto token = std::string(text.substr(pos, comma == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : comma - pos));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (token.empty() || used != token.size()) {
      throw Error(ErrorKind::InvalidInput,
                  "bad number '" + token + "' in jump descriptor '" + descriptor + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

JumpMomentSpec::JumpMomentSpec(Kind kind, double a, double b, std::vector<double> explicit_values)
    : kind_(kind), a_(a), b_(b), explicit_(std::move(explicit_values)) {}

JumpMomentSpec JumpMomentSpec::deterministic(double value) {
  return {Kind::Deterministic, value, 0.0};
}

JumpMomentSpec JumpMomentSpec::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(ErrorKind::InvalidInput, "exponential rate must be positive");
  return {Kind::Exponential, rate, 0.0};
}

JumpMomentSpec JumpMomentSpec::lognormal(double log_mean, double log_sd) {
  if (!(log_sd >= 0.0)) throw Error(ErrorKind::InvalidInput, "lognormal sigma must be >= 0");
  return {Kind::LogNormal, log_mean, log_sd};
}

JumpMomentSpec JumpMomentSpec::uniform() { return {Kind::Uniform, 0.0, 1.0}; }

JumpMomentSpec JumpMomentSpec::explicit_moments(std::vector<double> moments) {
  return {Kind::Explicit, 0.0, 0.0, std::move(moments)};
}

JumpMomentSpec JumpMomentSpec::parse(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string name = descriptor.substr(0, colon);
  const std::string_view rest =
      colon == std::string::npos ? std::string_view{} : std::string_view(descriptor).substr(colon + 1);
  const auto args = colon == std::string::npos ? std::vector<double>{}
                                               : parse_numbers(rest, descriptor);
  auto want = [&](std::size_t count) {
    if (args.size() != count) {
      throw Error(ErrorKind::InvalidInput, "jump descriptor '" + descriptor + "' expects " +
                                               std::to_string(count) + " argument(s)");
    }
  };
  if (name == "deterministic") {
    want(1);
    return deterministic(args[0]);
  }
  if (name == "exponential") {
    want(1);
    return exponential(args[0]);
  }
  if (name == "lognormal") {
    want(2);
    return lognormal(args[0], args[1]);
  }
  if (name == "uniform") {
    want(0);
    return uniform();
  }
  if (name == "explicit") {
    if (args.empty()) throw Error(ErrorKind::InvalidInput, "explicit moments list is empty");
    return explicit_moments(args);
  }
  throw Error(ErrorKind::InvalidInput, "unknown jump distribution '" + name + "'");
}

std::vector<double> JumpMomentSpec::moments(std::size_t n) const {
  std::vector<double> out(n);
  switch (kind_) {
    case Kind::Deterministic:
      return power_sequence(a_, n);
    case Kind::Exponential: {
      // k! / r^k
      double acc = 1.0;
      for (std::size_t k = 1; k <= n; ++k) {
        acc *= static_cast<double>(k) / a_;
        out[k - 1] = acc;
      }
      return out;
    }
    case Kind::LogNormal:
      for (std::size_t k = 1; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        out[k - 1] = std::exp(kk * a_ + kk * kk * b_ * b_ / 2.0);
      }
      return out;
    case Kind::Uniform:
      for (std::size_t k = 1; k <= n; ++k) out[k - 1] = 1.0 / static_cast<double>(k + 1);
      return out;
    case Kind::Explicit:
      if (explicit_.size() < n) {
        throw Error(ErrorKind::InsufficientMoments,
                    "explicit jump moments given to order " + std::to_string(explicit_.size()) +
                        ", need " + std::to_string(n));
      }
      return {explicit_.begin(), explicit_.begin() + static_cast<std::ptrdiff_t>(n)};
  }
  return out;
}

bool JumpMomentSpec::log_convex(std::size_t n) const {
  const auto m = moments(n);
  double previous = 1.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0)) return false;
    if (k + 1 < m.size()) {
      const double lhs = m[k + 1] * previous;
      if (lhs < m[k] * m[k] * (1.0 - 1e-12)) return false;
    }
    previous = m[k];
  }
  return true;
}

std::string JumpMomentSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Deterministic: os << "deterministic:" << a_; break;
    case Kind::Exponential: os << "exponential:" << a_; break;
    case Kind::LogNormal: os << "lognormal:" << a_ << ',' << b_; break;
    case Kind::Uniform: os << "uniform"; break;
    case Kind::Explicit:
      os << "explicit:";
      for (std::size_t i = 0; i < explicit_.size(); ++i) os << (i ? "," : "") << explicit_[i];
      break;
  }
  return os.str();
}

std::vector<double> power_sequence(double a, std::size_t n) {
  std::vector<double> out(n);
  double p = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    p *= a;
    out[k] = p;
  }
  return out;
}

BinomialTable::BinomialTable(std::size_t max_n)
    : max_n_(max_n), values_((max_n + 1) * (max_n + 1), 0.0) {
  const std::size_t w = max_n + 1;
  for (std::size_t i = 0; i <= max_n; ++i) {
    values_[i * w] = 1.0;
    for (std::size_t j = 1; j <= i; ++j) {
      values_[i * w + j] = values_[(i - 1) * w + j - 1] + (j < i ? values_[(i - 1) * w + j] : 0.0);
    }
  }
}

}  // namespace matryoshka
