#include "matryoshka/process_library.hpp"

#include <cmath>
#include <string>

namespace matryoshka {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::InvalidInput, message);
}

void require_order(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidDimension, "moment order must be at least 1");
}

// Shared skeleton: rows are produced one at a time so that the nesting is
// explicit. `fill(k, coef)` writes coef[0] = theta0_k, coef[1..k-1] = the
// sub-diagonal row, coef[k] = theta_kk for one-based k.
template <typename Fill>
BuiltSystem assemble(std::size_t n, double x0, Fill&& fill) {
  MatryoshkanMatrix theta;
  std::vector<double> theta0;
  theta0.reserve(n);
  std::vector<double> coef;
  for (std::size_t k = 1; k <= n; ++k) {
    coef.assign(k + 1, 0.0);
    fill(k, coef);
    theta0.push_back(coef[0]);
    theta.append_row(std::span<const double>(coef).subspan(1, k - 1), coef[k]);
  }
  BuiltSystem out{CoefficientSystem(std::move(theta), std::move(theta0)),
                  InitialMomentVector::from_value(x0, n), {}, {}};
  if (n > BinomialTable::kExactLimit) {
    out.warnings.push_back("binomial coefficients beyond order " +
                           std::to_string(BinomialTable::kExactLimit) + " are not exact");
  }
  return out;
}

void note_jump_table(BuiltSystem& out, const std::string& name, const JumpMomentSpec& spec,
                     std::vector<double> table) {
  if (spec.kind() == JumpMomentSpec::Kind::Explicit && !spec.log_convex(table.size())) {
    out.warnings.push_back(name + " moments are not a valid nonnegative moment sequence");
  }
  out.moment_tables.emplace_back(name, std::move(table));
}

int gamma_selector(double gamma) {
  if (gamma == 0.0) return 0;
  if (gamma == 1.0) return 1;
  if (gamma == 2.0) return 2;
  throw Error(ErrorKind::UnsupportedGamma,
              "gamma must be 0, 1 or 2 for an exact system (got " + std::to_string(gamma) + ")");
}

}  // namespace

MatryoshkanMatrix pascal_matryoshkan(std::size_t n, double a) {
  const BinomialTable binom(n);
  const auto pw = power_sequence(a, n);
  MatryoshkanMatrix out(n);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= i; ++j) out.set(i - 1, j - 1, binom(i, j - 1) * pw[i - j]);
  }
  return out;
}

MatryoshkanMatrix pascal_lower(std::size_t k, double a) {
  const BinomialTable binom(k);
  const auto pw = power_sequence(a, k);
  MatryoshkanMatrix out(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) out.set(i, j, binom(i, j) * (i == j ? 1.0 : pw[i - j - 1]));
  }
  return out;
}

BuiltSystem build_hawkes(const HawkesSpec& spec, std::size_t n) {
  require_order(n);
  require(spec.baseline > 0.0, "hawkes baseline must be positive");
  require(spec.jump > 0.0, "hawkes jump must be positive");
  require(spec.initial > 0.0, "hawkes initial intensity must be positive");
  require(std::isfinite(spec.decay), "hawkes decay must be finite");
  const BinomialTable binom(n);
  const auto pw = power_sequence(spec.jump, n);
  const double drift = spec.decay * spec.baseline;
  return assemble(n, spec.initial, [&](std::size_t k, std::vector<double>& coef) {
    const double kd = static_cast<double>(k);
    // Column j (one-based, j < k): C(k, j-1) alpha^{k-j+1}, plus k beta lambda* at j = k-1.
    for (std::size_t j = 1; j < k; ++j) coef[j] = binom(k, j - 1) * pw[k - j];
    coef[k - 1] += drift * kd;
    coef[k] = -(kd * (spec.decay - spec.jump));
  });
}

BuiltSystem build_shot_noise(const ShotNoiseSpec& spec, std::size_t n) {
  require_order(n);
  require(spec.rate > 0.0, "shot noise rate must be positive");
  require(spec.decay > 0.0, "shot noise decay must be positive");
  require(spec.initial >= 0.0, "shot noise initial value must be nonnegative");
  const BinomialTable binom(n);
  auto jumps = spec.jumps.moments(n);
  auto out = assemble(n, spec.initial, [&](std::size_t k, std::vector<double>& coef) {
    const double kd = static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) coef[i] = spec.rate * (binom(k, i) * jumps[k - i - 1]);
    coef[k] = -(kd * spec.decay);
  });
  note_jump_table(out, "jumps", spec.jumps, std::move(jumps));
  return out;
}

BuiltSystem build_ito(const ItoSpec& spec, std::size_t n) {
  require_order(n);
  const int gamma = gamma_selector(spec.gamma);
  const double half_var = spec.volatility * spec.volatility / 2.0;
  return assemble(n, spec.initial, [&](std::size_t k, std::vector<double>& coef) {
    const double kd = static_cast<double>(k);
    const double curvature = static_cast<double>(k * (k - 1));
    coef[k - 1] += spec.drift_intercept * kd;
    // n(n-1) sigma^2 / 2 lands on moment k + gamma - 2 (column 0 is the shift).
    if (k >= 2 && gamma < 2) coef[k + gamma - 2] += half_var * curvature;
    coef[k] = kd * spec.drift_slope;
    if (gamma == 2) coef[k] = coef[k] + curvature * half_var;
  });
}

std::pair<BuiltSystem, BuiltSystem> ito_gamma_bounds(const ItoSpec& spec, std::size_t n) {
  if (!(spec.gamma >= 0.0 && spec.gamma <= 2.0)) {
    throw Error(ErrorKind::UnsupportedGamma, "gamma must lie in [0, 2]");
  }
  ItoSpec lower = spec;
  ItoSpec upper = spec;
  lower.gamma = std::floor(spec.gamma);
  upper.gamma = std::ceil(spec.gamma);
  return {build_ito(lower, n), build_ito(upper, n)};
}

BuiltSystem build_growth_collapse(const GrowthCollapseSpec& spec, std::size_t n) {
  require_order(n);
  require(spec.growth > 0.0, "growth rate must be positive");
  require(spec.collapse_rate > 0.0, "collapse rate must be positive");
  require(spec.initial >= 0.0, "growth-collapse initial value must be nonnegative");
  auto fractions = spec.collapse_fraction.moments(n);
  auto out = assemble(n, spec.initial, [&](std::size_t k, std::vector<double>& coef) {
    coef[k - 1] += spec.growth * static_cast<double>(k);
    coef[k] = spec.collapse_rate * (fractions[k - 1] - 1.0);
  });
  note_jump_table(out, "collapse", spec.collapse_fraction, std::move(fractions));
  return out;
}

BuiltSystem build_ephemeral(const EphemeralSpec& spec, std::size_t n) {
  require_order(n);
  require(spec.baseline > 0.0, "ephemeral baseline must be positive");
  require(spec.jump > 0.0, "ephemeral jump must be positive");
  require(spec.expiry > 0.0, "ephemeral expiry rate must be positive");
  require(spec.initial >= 0.0 && std::floor(spec.initial) == spec.initial,
          "ephemeral initial count must be a nonnegative integer");
  const BinomialTable binom(n);
  return assemble(n, spec.initial, [&](std::size_t k, std::vector<double>& coef) {
    const double kd = static_cast<double>(k);
    coef[0] = spec.baseline;
    // C(k, j) nu* + C(k, j-1) alpha + C(k, j-1) mu (-1)^{k-j-1}
    for (std::size_t j = 1; j < k; ++j) {
      const double sign = (k - j + 1) % 2 == 0 ? 1.0 : -1.0;
      double v = spec.jump * binom(k, j - 1);
      v += spec.baseline * binom(k, j);
      v += spec.expiry * (binom(k, j - 1) * sign);
      coef[j] = v;
    }
    coef[k] = -(kd * (spec.expiry - spec.jump));
  });
}

BuiltSystem build_generic(const GenericGeneratorSpec& spec, std::size_t n) {
  require_order(n);
  const auto& a = spec.coefficients;
  for (double v : a) require(std::isfinite(v), "generic coefficients must be finite");
  const BinomialTable binom(n);
  const bool has_up = a[0] != 0.0 || a[1] != 0.0;
  const bool has_down = a[2] != 0.0 || a[3] != 0.0;
  const bool has_collapse = a[9] != 0.0;
  const auto up = has_up ? spec.up.moments(n) : std::vector<double>(n, 0.0);
  const auto down = has_down ? spec.down.moments(n) : std::vector<double>(n, 0.0);
  const auto collapse = has_collapse ? spec.collapse.moments(n) : std::vector<double>(n, 1.0);

  auto out = assemble(n, spec.initial, [&](std::size_t k, std::vector<double>& coef) {
    const double kd = static_cast<double>(k);
    const double curvature = static_cast<double>(k * (k - 1));
    // Up-jumps: E[(x + A)^k - x^k] = sum_{i<k} C(k, i) E[A^{k-i}] x^i.
    if (has_up) {
      for (std::size_t i = 0; i < k; ++i) {
        const double t = binom(k, i) * up[k - i - 1];
        coef[i] += a[0] * t;
        coef[i + 1] += a[1] * t;
      }
    }
    // Down-jumps: E[(x - B)^k - x^k] = sum_{i<k} C(k, i) (-1)^{k-i} E[B^{k-i}] x^i.
    if (has_down) {
      for (std::size_t i = 0; i < k; ++i) {
        const double sign = (k - i) % 2 == 0 ? 1.0 : -1.0;
        const double t = binom(k, i) * sign * down[k - i - 1];
        coef[i] += a[2] * t;
        coef[i + 1] += a[3] * t;
      }
    }
    // Drift: (a4 + a5 x) k x^{k-1}.
    coef[k - 1] += a[4] * kd;
    // Diffusion: (a6 + a7 x + a8 x^2) k (k-1) x^{k-2}.
    if (k >= 2) {
      coef[k - 2] += a[6] * curvature;
      coef[k - 1] += a[7] * curvature;
    }
    // Diagonal collected in closed form.
    const double mean_up = has_up ? up[0] : 0.0;
    const double mean_down = has_down ? down[0] : 0.0;
    coef[k] = kd * (a[1] * mean_up - a[3] * mean_down + a[5]) + curvature * a[8] +
              a[9] * (collapse[k - 1] - 1.0);
  });
  if (has_up) note_jump_table(out, "A", spec.up, up);
  if (has_down) note_jump_table(out, "B", spec.down, down);
  if (has_collapse) note_jump_table(out, "C", spec.collapse, collapse);
  return out;
}

BuiltSystem build(const ProcessSpec& spec, std::size_t n) {
  return std::visit(
      [n](const auto& s) -> BuiltSystem {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HawkesSpec>) return build_hawkes(s, n);
        else if constexpr (std::is_same_v<T, ShotNoiseSpec>) return build_shot_noise(s, n);
        else if constexpr (std::is_same_v<T, ItoSpec>) return build_ito(s, n);
        else if constexpr (std::is_same_v<T, GrowthCollapseSpec>) return build_growth_collapse(s, n);
        else if constexpr (std::is_same_v<T, EphemeralSpec>) return build_ephemeral(s, n);
        else return build_generic(s, n);
      },
      spec);
}

GenericGeneratorSpec to_generic(const HawkesSpec& spec) {
  GenericGeneratorSpec g;
  g.coefficients[1] = 1.0;
  g.coefficients[4] = spec.decay * spec.baseline;
  g.coefficients[5] = -spec.decay;
  g.up = JumpMomentSpec::deterministic(spec.jump);
  g.initial = spec.initial;
  return g;
}

GenericGeneratorSpec to_generic(const ShotNoiseSpec& spec) {
  GenericGeneratorSpec g;
  g.coefficients[0] = spec.rate;
  g.coefficients[5] = -spec.decay;
  g.up = spec.jumps;
  g.initial = spec.initial;
  return g;
}

GenericGeneratorSpec to_generic(const ItoSpec& spec) {
  GenericGeneratorSpec g;
  const double half_var = spec.volatility * spec.volatility / 2.0;
  g.coefficients[4] = spec.drift_intercept;
  g.coefficients[5] = spec.drift_slope;
  g.coefficients[6 + static_cast<std::size_t>(gamma_selector(spec.gamma))] = half_var;
  g.initial = spec.initial;
  return g;
}

GenericGeneratorSpec to_generic(const GrowthCollapseSpec& spec) {
  GenericGeneratorSpec g;
  g.coefficients[4] = spec.growth;
  g.coefficients[9] = spec.collapse_rate;
  g.collapse = spec.collapse_fraction;
  g.initial = spec.initial;
  return g;
}

GenericGeneratorSpec to_generic(const EphemeralSpec& spec) {
  GenericGeneratorSpec g;
  g.coefficients[0] = spec.baseline;
  g.coefficients[1] = spec.jump;
  g.coefficients[3] = spec.expiry;
  g.up = JumpMomentSpec::deterministic(1.0);
  g.down = JumpMomentSpec::deterministic(1.0);
  g.initial = spec.initial;
  return g;
}

bool nonnegative_valued(const ProcessSpec& spec) {
  return !std::holds_alternative<ItoSpec>(spec) && !std::holds_alternative<GenericGeneratorSpec>(spec);
}

std::string family_name(const ProcessSpec& spec) {
  static constexpr const char* names[] = {"hawkes",         "shotnoise", "ito",
                                          "growthcollapse", "ephemeral", "generic"};
  return names[spec.index()];
}

}  // namespace matryoshka
