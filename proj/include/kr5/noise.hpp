#pragma once

#include <cstdint>
#include <vector>

#include "kr5/types.hpp"

namespace kr5 {

/// Four independent level-fluctuation processes sampled on a uniform grid.
/// Lanes are levels 1, 2, 3 (shared by the degenerate pair 3/4) and 5.
/// The shift on [start + j*step, start + (j+1)*step) is the value at node j.
struct NoisePath {
  static constexpr int kLanes = 4;

  double start = 0.0;
  double step = 0.0;
  std::vector<double> lanes;  // interleaved, kLanes per node
  std::uint64_t seed = 0;

  std::size_t nodes() const { return lanes.size() / kLanes; }
  double value(int lane, std::size_t node) const { return lanes[kLanes * node + lane]; }
  double node_time(std::size_t node) const { return start + static_cast<double>(node) * step; }

  /// Diagonal shifts for the five levels; level 4 copies level 3.
  RealVector5 level_shifts(std::size_t node) const {
    const double* v = &lanes[kLanes * node];
    return {v[0], v[1], v[2], v[2], v[3]};
  }
};

}  // namespace kr5
