#include "matryoshka/mc_oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace matryoshka {

namespace {

class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential() { return -std::log1p(-uniform()); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log1p(-uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::InvalidInput, message);
}

double sample(const JumpMomentSpec& spec, PathRng& rng) {
  switch (spec.kind()) {
    case JumpMomentSpec::Kind::Deterministic: return spec.first();
    case JumpMomentSpec::Kind::Exponential: return rng.exponential() / spec.first();
    case JumpMomentSpec::Kind::LogNormal: return std::exp(spec.first() + spec.second() * rng.normal());
    case JumpMomentSpec::Kind::Uniform: return rng.uniform();
    case JumpMomentSpec::Kind::Explicit: break;
  }
  throw Error(ErrorKind::InvalidInput, "cannot sample from an explicit moment list");
}

void require_samplable(const JumpMomentSpec& spec) {
  require(spec.kind() != JumpMomentSpec::Kind::Explicit,
          "simulation needs a distribution, not an explicit moment list");
}

double hawkes_path(const HawkesSpec& s, double horizon, PathRng& rng) {
  double t = 0.0;
  double lambda = s.initial;
  while (true) {
    const double excess = lambda - s.baseline;
    double wait = std::numeric_limits<double>::infinity();
    if (excess >= 0.0) {
      // Baseline arrivals and the decaying excess are independent clocks; the
      // excess clock has integrated hazard excess (1 - e^{-beta u}) / beta.
      wait = rng.exponential() / s.baseline;
      const double e = rng.exponential();
      if (excess > 0.0 && s.decay * e < excess) {
        wait = std::min(wait, -std::log1p(-s.decay * e / excess) / s.decay);
      }
    } else {
      // Intensity rises toward the baseline, so the baseline bounds it: thin.
      double u = 0.0;
      while (true) {
        u += rng.exponential() / s.baseline;
        if (t + u >= horizon) break;
        const double rate = s.baseline + excess * std::exp(-s.decay * u);
        if (rng.uniform() * s.baseline < rate) break;
      }
      wait = u;
    }
    if (t + wait >= horizon) return s.baseline + excess * std::exp(-s.decay * (horizon - t));
    t += wait;
    lambda = s.baseline + excess * std::exp(-s.decay * wait) + s.jump;
  }
}

double shot_noise_path(const ShotNoiseSpec& s, double horizon, PathRng& rng) {
  double value = s.initial * std::exp(-s.decay * horizon);
  double t = rng.exponential() / s.rate;
  while (t < horizon) {
    value += sample(s.jumps, rng) * std::exp(-s.decay * (horizon - t));
    t += rng.exponential() / s.rate;
  }
  return value;
}

double growth_collapse_path(const GrowthCollapseSpec& s, double horizon, PathRng& rng) {
  double y = s.initial;
  double t = 0.0;
  while (true) {
    const double wait = rng.exponential() / s.collapse_rate;
    if (t + wait >= horizon) return y + s.growth * (horizon - t);
    t += wait;
    y = (y + s.growth * wait) * sample(s.collapse_fraction, rng);
  }
}

double ephemeral_path(const EphemeralSpec& s, double horizon, PathRng& rng) {
  double q = s.initial;
  double t = 0.0;
  while (true) {
    const double birth = s.baseline + s.jump * q;
    const double death = s.expiry * q;
    const double total = birth + death;
    t += rng.exponential() / total;
    if (t >= horizon) return q;
    q += rng.uniform() * total < birth ? 1.0 : -1.0;
  }
}

std::size_t step_count(double horizon, double step) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / step - 1e-9)));
}

double ito_path(const ItoSpec& s, double horizon, double step, PathRng& rng) {
  const std::size_t steps = step_count(horizon, step);
  const double h = horizon / static_cast<double>(steps);
  const double root_h = std::sqrt(h);
  const bool floored = s.gamma > 0.0;
  double x = s.initial;
  for (std::size_t i = 0; i < steps; ++i) {
    const double scale = s.gamma == 0.0 ? 1.0 : std::pow(x, s.gamma / 2.0);
    x += (s.drift_intercept + s.drift_slope * x) * h + s.volatility * scale * root_h * rng.normal();
    if (floored && x < 0.0) x = 0.0;
  }
  return x;
}

bool constant_rates(const GenericGeneratorSpec& s) {
  const auto& a = s.coefficients;
  return a[1] == 0.0 && a[3] == 0.0 && a[5] == 0.0 && a[6] == 0.0 && a[7] == 0.0 && a[8] == 0.0;
}

double generic_exact_path(const GenericGeneratorSpec& s, double horizon, PathRng& rng) {
  const auto& a = s.coefficients;
  const double total = a[0] + a[2] + a[9];
  double x = s.initial;
  double t = 0.0;
  while (true) {
    const double wait = total > 0.0 ? rng.exponential() / total
                                    : std::numeric_limits<double>::infinity();
    if (t + wait >= horizon) return x + a[4] * (horizon - t);
    t += wait;
    x += a[4] * wait;
    const double pick = rng.uniform() * total;
    if (pick < a[0]) x += sample(s.up, rng);
    else if (pick < a[0] + a[2]) x -= sample(s.down, rng);
    else x *= sample(s.collapse, rng);
  }
}

double generic_discretized_path(const GenericGeneratorSpec& s, double horizon, double step,
                                PathRng& rng) {
  const auto& a = s.coefficients;
  const std::size_t steps = step_count(horizon, step);
  const double h = horizon / static_cast<double>(steps);
  double x = s.initial;
  auto fires = [&](double rate) { return rate > 0.0 && rng.uniform() < -std::expm1(-rate * h); };
  for (std::size_t i = 0; i < steps; ++i) {
    const double x0 = x;
    double dx = (a[4] + a[5] * x0) * h;
    const double q = a[6] + a[7] * x0 + a[8] * x0 * x0;
    if (q > 0.0) dx += std::sqrt(2.0 * q * h) * rng.normal();
    if (fires(a[0] + a[1] * x0)) dx += sample(s.up, rng);
    if (fires(a[2] + a[3] * x0)) dx -= sample(s.down, rng);
    x = x0 + dx;
    if (fires(a[9])) x *= sample(s.collapse, rng);
  }
  return x;
}

}  // namespace

std::vector<double> simulate(const ProcessSpec& spec, const SimConfig& cfg) {
  require(cfg.paths >= 1, "at least one path is required");
  require(cfg.horizon >= 0.0 && std::isfinite(cfg.horizon), "horizon must be finite and >= 0");
  require(cfg.sim_step > 0.0 && std::isfinite(cfg.sim_step), "simulation step must be positive");

  // Validate parameters once through the builder; non-integer gamma has no
  // exact system, so its bracketing pair is built instead.
  const auto* ito = std::get_if<ItoSpec>(&spec);
  if (ito != nullptr && ito->gamma != std::floor(ito->gamma)) {
    (void)ito_gamma_bounds(*ito, 1);
  } else {
    (void)build(spec, 1);
  }
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HawkesSpec>) {
          require(s.decay > 0.0, "hawkes simulation needs a positive decay");
        } else if constexpr (std::is_same_v<T, ShotNoiseSpec>) {
          require_samplable(s.jumps);
        } else if constexpr (std::is_same_v<T, GrowthCollapseSpec>) {
          require_samplable(s.collapse_fraction);
        } else if constexpr (std::is_same_v<T, GenericGeneratorSpec>) {
          const auto& a = s.coefficients;
          if (a[0] != 0.0 || a[1] != 0.0) require_samplable(s.up);
          if (a[2] != 0.0 || a[3] != 0.0) require_samplable(s.down);
          if (a[9] != 0.0) require_samplable(s.collapse);
          for (std::size_t i : {0, 2, 9}) require(a[i] >= 0.0, "generic jump rates must be >= 0");
        }
      },
      spec);

  std::vector<double> out(cfg.paths);
  for (std::size_t i = 0; i < cfg.paths; ++i) {
    PathRng rng(cfg.seed, i);
    out[i] = std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HawkesSpec>) return hawkes_path(s, cfg.horizon, rng);
          else if constexpr (std::is_same_v<T, ShotNoiseSpec>) return shot_noise_path(s, cfg.horizon, rng);
          else if constexpr (std::is_same_v<T, ItoSpec>) return ito_path(s, cfg.horizon, cfg.sim_step, rng);
          else if constexpr (std::is_same_v<T, GrowthCollapseSpec>) return growth_collapse_path(s, cfg.horizon, rng);
          else if constexpr (std::is_same_v<T, EphemeralSpec>) return ephemeral_path(s, cfg.horizon, rng);
          else if (constant_rates(s)) return generic_exact_path(s, cfg.horizon, rng);
          else return generic_discretized_path(s, cfg.horizon, cfg.sim_step, rng);
        },
        spec);
  }
  return out;
}

EstimateReport estimate_moments(std::span<const double> terminals, std::size_t n) {
  if (terminals.size() < 2) {
    throw Error(ErrorKind::InvalidInput, "moment estimation needs at least two terminal values");
  }
  if (n == 0) throw Error(ErrorKind::InvalidDimension, "moment order must be at least 1");
  const double count = static_cast<double>(terminals.size());
  EstimateReport report;
  for (std::size_t k = 1; k <= n; ++k) {
    // Compensated summation for the mean, then a second pass for the variance.
    double sum = 0.0;
    double carry = 0.0;
    std::vector<double> powers(terminals.size());
    for (std::size_t i = 0; i < terminals.size(); ++i) {
      powers[i] = std::pow(terminals[i], static_cast<double>(k));
      const double y = powers[i] - carry;
      const double t = sum + y;
      carry = (t - sum) - y;
      sum = t;
    }
    const double mean = sum / count;
    double ss = 0.0;
    carry = 0.0;
    for (double p : powers) {
      const double d = p - mean;
      const double y = d * d - carry;
      const double t = ss + y;
      carry = (t - ss) - y;
      ss = t;
    }
    const double se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    if (mean != 0.0 ? std::abs(se / mean) > 0.2 : se > 0.0) {
      report.warnings.push_back("moment " + std::to_string(k) + ": relative standard error " +
                                std::to_string(mean != 0.0 ? std::abs(se / mean) : 0.0) +
                                " exceeds 20%");
    }
    report.estimates.push_back({k, mean, se, terminals.size()});
  }
  return report;
}

}  // namespace matryoshka
