#pragma once

#include <random>

#include "kr5/model.hpp"

namespace kr5::test {

inline PulseSet fig2a() { return PulseSet::standard(10, 30, 70, 30, 50); }
inline PulseSet fig2b() { return PulseSet::standard(10, 60, 40, 30, 50); }
inline PulseSet fig3() { return PulseSet::standard(20, 50, 40, 15, 75); }

/// All five pulses share one envelope centred at 0, so envelopes(0) returns the peaks.
inline PulseSet flat(double p, double s3, double s4, double b3, double b4) {
  const Envelope e{0.0, 1.0, 1.0};
  return {{p, e}, {s3, e}, {s4, e}, {b3, e}, {b4, e}};
}

inline RabiValues random_rabi(std::mt19937_64& rng, double hi = 100.0) {
  std::uniform_real_distribution<double> u(0.5, hi);
  return {u(rng), u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace kr5::test

#include <cmath>
#include <vector>

#include "kr5/dephasing.hpp"

namespace kr5::test {

struct OuStatistics {
  double mean = 0.0;           // over all lanes and nodes used
  double mean_se = 0.0;
  double variance = 0.0;       // at the mid node, all lanes
  double autocorr_tau = 0.0;   // <x(0) x(tau)> / Delta^2
  double cross = 0.0;          // <x_1 x_2> / Delta^2 at the mid node
  double cross_se = 0.0;
  /// worst |C(l) - Delta^2 e^{-l/tau}| in standard errors over lags tau/2, tau, 2tau, 3tau, 5tau
  double lag_worst_sigma = 0.0;
  /// same over every grid lag up to 20 tau (many correlated comparisons; informational)
  double lag_scan_worst_sigma = 0.0;
  bool lanes_3_4_shared = true;
};

/// Ensemble statistics of `paths` OU paths with 20 nodes per tau.
inline OuStatistics ou_statistics(double delta, double tau, int paths, std::uint64_t seed) {
  const std::size_t per_tau = 10;
  const NoiseGrid grid{0.0, tau / per_tau, 20 * per_tau + 1};
  const std::size_t mid = grid.nodes / 2;
  const double d2 = delta * delta;
  double sum = 0, sumsq = 0, cross = 0, cross_sq = 0, cnt = 0;
  std::vector<double> lag(grid.nodes, 0.0), lag_sq(grid.nodes, 0.0);
  double var_sum = 0;
  bool shared = true;
  for (int i = 0; i < paths; ++i) {
    const NoisePath p = generate_path(delta, tau, grid, derive_seed(seed, i));
    for (int l = 0; l < NoisePath::kLanes; ++l) {
      const double x0 = p.value(l, 0);
      for (std::size_t n = 0; n < grid.nodes; ++n) {
        const double c = x0 * p.value(l, n);
        lag[n] += c;
        lag_sq[n] += c * c;
      }
      const double xm = p.value(l, mid);
      sum += xm;
      sumsq += xm * xm;
      var_sum += xm * xm;
      cnt += 1;
    }
    const double c12 = p.value(0, mid) * p.value(1, mid);
    cross += c12;
    cross_sq += c12 * c12;
    const RealVector5 s = p.level_shifts(mid);
    if (s[2] != s[3]) shared = false;
  }
  OuStatistics out;
  out.lanes_3_4_shared = shared;
  out.mean = sum / cnt;
  out.mean_se = std::sqrt((sumsq / cnt - out.mean * out.mean) / cnt);
  out.variance = var_sum / cnt / d2;
  out.autocorr_tau = lag[per_tau] / cnt / d2;
  out.cross = cross / paths / d2;
  out.cross_se = std::sqrt(cross_sq / paths - std::pow(cross / paths, 2)) / std::sqrt(paths) / d2;
  for (std::size_t n = 0; n < grid.nodes; ++n) {
    const double m = lag[n] / cnt;
    const double se = std::sqrt((lag_sq[n] / cnt - m * m) / cnt);
    const double expect = d2 * std::exp(-static_cast<double>(n) / per_tau);
    const double z = std::abs(m - expect) / se;
    out.lag_scan_worst_sigma = std::max(out.lag_scan_worst_sigma, z);
    if (n == per_tau / 2 || n == per_tau || n == 2 * per_tau || n == 3 * per_tau || n == 5 * per_tau)
      out.lag_worst_sigma = std::max(out.lag_worst_sigma, z);
  }
  return out;
}

}  // namespace kr5::test
