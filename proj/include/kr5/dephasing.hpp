#pragma once

// Stochastic level fluctuations with Gaussian statistics and exponential
// correlation <dw_k(t) dw_k'(t')> = delta_kk' Delta^2 exp(-|t-t'|/tau), and
// Monte Carlo ensembles of propagations driven by them.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kr5/model.hpp"
#include "kr5/noise.hpp"
#include "kr5/propagator.hpp"

namespace kr5 {

/// Counter-based child seed: independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

struct NoiseGrid {
  double start = 0.0;
  double step = 0.0;
  std::size_t nodes = 0;
};

/// Grid of spacing refresh_fraction*tau covering the window.
NoiseGrid noise_grid(const SimConfig& config);

/// Exact discretization of the Ornstein-Uhlenbeck process on each lane,
/// starting from a stationary draw. Lane l uses the stream derive_seed(seed, l).
NoisePath generate_path(double delta, double tau, const NoiseGrid& grid, std::uint64_t seed);

struct EnsembleResult {
  std::vector<double> xi;
  std::array<std::vector<double>, kLevels> mean;
  std::array<std::vector<double>, kLevels> std_error;
  std::vector<double> mean_norm;
  std::vector<double> stderr_norm;
  double gamma = 0.0;
  double final_p3 = 0.0;
  double final_p4 = 0.0;
  double stderr_p3 = 0.0;
  double stderr_p4 = 0.0;
  /// mean P3 / mean P4 at the end of the window.
  BranchingRatio ratio_of_means;
  /// Mean of per-realization P3/P4 over realizations with P4 above the floor.
  double mean_of_ratios = 0.0;
  int ratio_samples = 0;
  int realizations = 0;
  int failures = 0;
  std::uint64_t master_seed = 0;
};

/// Runs config.dephasing.realizations propagations. Realization i uses the
/// noise seed derive_seed(master_seed, i); the reduction is in index order,
/// so the result does not depend on `jobs`.
EnsembleResult ensemble_run(const PulseSet& pulses, const SimConfig& config, unsigned jobs);

void write_ensemble_mean_csv(std::ostream& os, const EnsembleResult& result);
void write_ensemble_stderr_csv(std::ostream& os, const EnsembleResult& result);
/// JSON summary record.
std::string ensemble_summary_json(const EnsembleResult& result);

}  // namespace kr5
