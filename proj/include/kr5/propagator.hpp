#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "kr5/integrator.hpp"
#include "kr5/model.hpp"
#include "kr5/noise.hpp"

namespace kr5 {

/// |k> for k in 1..5.
StateVector basis_state(int level);

struct TrajectoryRecord {
  std::vector<double> xi;
  std::array<std::vector<double>, kLevels> populations;
  std::vector<double> norm;  // squared norm |psi|^2
  StateVector final_state{};
  std::uint64_t config_hash = 0;
  std::optional<std::uint64_t> seed;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;

  std::size_t size() const { return xi.size(); }
  double final_population(int level) const { return populations[level - 1].back(); }
  double max_population(int level) const;
};

/// Integrates i d(psi)/d(xi) = H(xi) psi over config.window from `initial`.
/// The diagonal (decay, measurement, dephasing) is advanced exactly; the
/// couplings by the adaptive integrating-factor DOPRI5 pair.
TrajectoryRecord propagate(const PulseSet& pulses, const SimConfig& config,
                           const NoisePath* noise = nullptr,
                           const StateVector& initial = basis_state(1));

/// Noise-free evolution between two arbitrary times (either direction).
StateVector evolve(const PulseSet& pulses, const SimConfig& config, double from, double to,
                   StateVector state, StepControl* control = nullptr);

RealVector5 populations(const StateVector& state);

inline constexpr double kPopulationFloor = 1e-10;

/// P3/P4 at the end of the record, with infinity / 0-over-0 markers below `floor`.
BranchingRatio final_branching(const TrajectoryRecord& record, double floor = kPopulationFloor);
BranchingRatio population_ratio(double p3, double p4, double floor = kPopulationFloor);

/// `xi,P1,P2,P3,P4,P5,norm`, 12 significant digits.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

/// Formats a double as %.11e.
std::string format_number(double v);

/// FNV-1a over the numeric content of the configuration.
std::uint64_t config_hash(const PulseSet& pulses, const SimConfig& config);

}  // namespace kr5
