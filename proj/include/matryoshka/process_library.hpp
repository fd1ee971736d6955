#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "matryoshka/jump_moments.hpp"
#include "matryoshka/moment_engine.hpp"

namespace matryoshka {

/// Hawkes intensity: jumps by `jump` at each arrival, decays at rate `decay`
/// toward `baseline`.
struct HawkesSpec {
  double baseline = 1.0;
  double jump = 1.0;
  double decay = 2.0;
  /// Initial intensity; defaults to the baseline.
  double initial = 1.0;

  static HawkesSpec with_baseline_start(double baseline, double jump, double decay) {
    return {baseline, jump, decay, baseline};
  }
};

/// Exponentially decaying superposition of i.i.d. jumps at Poisson epochs.
struct ShotNoiseSpec {
  double rate = 1.0;
  double decay = 1.0;
  JumpMomentSpec jumps = JumpMomentSpec::deterministic(1.0);
  double initial = 0.0;
};

/// dS = (mu + theta S) dt + sigma S^{gamma/2} dB.
struct ItoSpec {
  double drift_intercept = 0.0;
  double drift_slope = 0.0;
  double volatility = 0.0;
  double gamma = 0.0;
  double initial = 0.0;
};

/// Linear growth at `growth`, multiplicative collapses Y -> C Y at rate `collapse_rate`.
struct GrowthCollapseSpec {
  double growth = 1.0;
  double collapse_rate = 1.0;
  double initial = 0.0;
  JumpMomentSpec collapse_fraction = JumpMomentSpec::uniform();
};

/// Birth rate baseline + jump * Q, death rate expiry * Q.
struct EphemeralSpec {
  double baseline = 1.0;
  double jump = 1.0;
  double expiry = 2.0;
  double initial = 0.0;
};

/// Generator
///   (a0 + a1 x)(f(x+A) - f(x)) + (a2 + a3 x)(f(x-B) - f(x))
///   + (a4 + a5 x) f'(x) + (a6 + a7 x + a8 x^2) f''(x) + a9 (f(Cx) - f(x)).
struct GenericGeneratorSpec {
  std::array<double, 10> coefficients{};
  JumpMomentSpec up = JumpMomentSpec::deterministic(0.0);
  JumpMomentSpec down = JumpMomentSpec::deterministic(0.0);
  JumpMomentSpec collapse = JumpMomentSpec::deterministic(1.0);
  double initial = 0.0;
};

using ProcessSpec = std::variant<HawkesSpec, ShotNoiseSpec, ItoSpec, GrowthCollapseSpec,
                                 EphemeralSpec, GenericGeneratorSpec>;

/// Output of a builder: the moment system, the initial powers, the jump
/// moment tables it was built from, and any non-fatal warnings.
struct BuiltSystem {
  CoefficientSystem system;
  InitialMomentVector init;
  std::vector<std::pair<std::string, std::vector<double>>> moment_tables;
  std::vector<std::string> warnings;
};

/// (P_n(a))_{ij} = C(i, j-1) a^{i-j+1} for i >= j (one-based).
MatryoshkanMatrix pascal_matryoshkan(std::size_t n, double a);
/// L_k(a) = exp(a diag(1:k-1, -1)), entries C(i-1, j-1) a^{i-j}.
MatryoshkanMatrix pascal_lower(std::size_t k, double a);

BuiltSystem build_hawkes(const HawkesSpec& spec, std::size_t n);
BuiltSystem build_shot_noise(const ShotNoiseSpec& spec, std::size_t n);
BuiltSystem build_ito(const ItoSpec& spec, std::size_t n);
BuiltSystem build_growth_collapse(const GrowthCollapseSpec& spec, std::size_t n);
BuiltSystem build_ephemeral(const EphemeralSpec& spec, std::size_t n);
BuiltSystem build_generic(const GenericGeneratorSpec& spec, std::size_t n);
BuiltSystem build(const ProcessSpec& spec, std::size_t n);

/// Exact systems with gamma replaced by floor(gamma) and ceil(gamma). For a
/// process with S >= 1 pathwise these bracket the true moments.
std::pair<BuiltSystem, BuiltSystem> ito_gamma_bounds(const ItoSpec& spec, std::size_t n);

/// The same process expressed through the generic generator.
GenericGeneratorSpec to_generic(const HawkesSpec& spec);
GenericGeneratorSpec to_generic(const ShotNoiseSpec& spec);
GenericGeneratorSpec to_generic(const ItoSpec& spec);
GenericGeneratorSpec to_generic(const GrowthCollapseSpec& spec);
GenericGeneratorSpec to_generic(const EphemeralSpec& spec);

/// True for families whose state never goes negative.
bool nonnegative_valued(const ProcessSpec& spec);
std::string family_name(const ProcessSpec& spec);

}  // namespace matryoshka
