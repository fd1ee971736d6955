#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "matryoshka/process_library.hpp"

namespace matryoshka {

struct SimConfig {
  std::size_t paths = 10000;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  /// Time step for families that are discretized (Ito, state-dependent generic).
  double sim_step = 1e-3;
};

/// Terminal values X_t, one per path, in path-index order. Path i draws from
/// its own mt19937_64 stream seeded with (seed, i), so the output does not
/// depend on how paths are scheduled.
///
/// Hawkes, shot noise, growth-collapse, ephemeral and constant-rate generic
/// processes are simulated event by event without discretization. Ito
/// processes use Euler-Maruyama (weak error O(sim_step)); for gamma > 0 the
/// state is floored at zero after each step.
std::vector<double> simulate(const ProcessSpec& spec, const SimConfig& cfg);

struct MomentEstimate {
  std::size_t order = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
};

struct EstimateReport {
  std::vector<MomentEstimate> estimates;
  std::vector<std::string> warnings;
};

/// Sample means of X^k, k = 1..n, with standard error sd / sqrt(paths) (sd
/// uses the n-1 denominator). Warns when the relative standard error
/// exceeds 20%. Throws InvalidInput for fewer than two terminals.
EstimateReport estimate_moments(std::span<const double> terminals, std::size_t n);

}  // namespace matryoshka
