#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kr5/adiabatic.hpp"
#include "kr5/dephasing.hpp"
#include "kr5/propagator.hpp"

namespace kr5 {

/// Two-level prediction of the final target yields.
struct TheoryYields {
  double p3 = 0.0;
  double p4 = 0.0;
  BranchingRatio ratio;
  Complex c1{1.0, 0.0};
  Complex c2{0.0, 0.0};
};

/// Final C1, C2 mapped onto |3>, |4> through |lambda_1> and |lambda_2'> at the
/// end of the window. gamma = 0 is the adiabatic limit C1 = 1, C2 = 0.
TheoryYields theory_yields(const PulseSet& pulses, double gamma, const Window& window,
                           double tolerance);

struct SweepRow {
  double gamma = 0.0;
  double p3_exact = 0.0;
  double p4_exact = 0.0;
  BranchingRatio b_exact;
  double p3_theory = 0.0;
  double p4_theory = 0.0;
  BranchingRatio b_theory;
  double max_p2 = 0.0;
  Regime regime = Regime::Adiabatic;
  std::string error;  // empty when both routes succeeded
};

struct SweepResult {
  std::string scenario;
  std::vector<SweepRow> rows;
};

/// n logarithmically spaced points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

/// Exact propagation and two-level theory at each gamma (strictly increasing).
/// Per-row failures are recorded in SweepRow::error and the sweep continues.
SweepResult gamma_sweep(const PulseSet& pulses, const std::vector<double>& gammas,
                        const SimConfig& config, unsigned jobs, std::string scenario = {});

void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

/// One ensemble per gamma, seeds shared across the gamma list.
std::vector<EnsembleResult> dephasing_study(const PulseSet& pulses,
                                            const std::vector<double>& gammas,
                                            const SimConfig& config, unsigned jobs);

struct ZenoProbe {
  std::vector<double> gammas;
  std::vector<BranchingRatio> ratios;
  /// B_inf from B(gamma) ~ B_inf + a/gamma through the last two points.
  double extrapolated = 0.0;
  /// Propagation with level 5 removed.
  BranchingRatio four_level;
  /// Stokes peak ratio S3^2 / S4^2.
  BranchingRatio stokes_ratio;
  bool monotone = true;
};

/// Propagations at gamma = m * (max peak)^2 for each multiplier m.
ZenoProbe zeno_limit_probe(const PulseSet& pulses, const SimConfig& config,
                           const std::vector<double>& multipliers = {1.0, 10.0, 100.0},
                           unsigned jobs = 1);

/// B of the four-level system obtained by deleting the branch state.
BranchingRatio four_level_branching(const PulseSet& pulses, const SimConfig& config);

}  // namespace kr5
