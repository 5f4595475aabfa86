#include "kr5/dephasing.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <random>

#include <json.hpp>

#include "kr5/kernels.hpp"
#include "kr5/parallel.hpp"

namespace kr5 {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr int kSeries = kLevels + 1;  // five populations and the norm

const std::vector<double>& series_of(const TrajectoryRecord& rec, int s) {
  return s < kLevels ? rec.populations[s] : rec.norm;
}

void write_series_csv(std::ostream& os, const std::vector<double>& xi,
                      const std::array<std::vector<double>, kLevels>& pops,
                      const std::vector<double>& norm) {
  os << "xi,P1,P2,P3,P4,P5,norm\n";
  for (std::size_t n = 0; n < xi.size(); ++n) {
    os << format_number(xi[n]);
    for (int k = 0; k < kLevels; ++k) os << ',' << format_number(pops[k][n]);
    os << ',' << format_number(norm[n]) << '\n';
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(splitmix64(parent) ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

NoiseGrid noise_grid(const SimConfig& config) {
  if (!(config.dephasing.tau > 0.0))
    throw ValidationError("dephasing tau must be > 0: the correlation kernel is undefined at 0");
  NoiseGrid g;
  g.start = config.window.start;
  g.step = config.dephasing.refresh_fraction * config.dephasing.tau;
  g.nodes = static_cast<std::size_t>(std::ceil(config.window.length() / g.step)) + 1;
  return g;
}

NoisePath generate_path(double delta, double tau, const NoiseGrid& grid, std::uint64_t seed) {
  if (!(tau > 0.0))
    throw ValidationError("dephasing tau must be > 0: the correlation kernel is undefined at 0");
  if (!(delta >= 0.0)) throw ValidationError("dephasing delta must be >= 0");
  if (grid.nodes == 0 || !(grid.step > 0.0)) throw ValidationError("noise grid is empty");

  constexpr int L = NoisePath::kLanes;
  NoisePath path;
  path.start = grid.start;
  path.step = grid.step;
  path.seed = seed;
  path.lanes.assign(L * grid.nodes, 0.0);
  if (delta == 0.0) return path;

  const std::size_t steps = grid.nodes - 1;
  std::vector<double> z(L * steps);
  std::normal_distribution<double> normal;
  for (int l = 0; l < L; ++l) {
    std::mt19937_64 engine(derive_seed(seed, static_cast<std::uint64_t>(l)));
    path.lanes[l] = delta * normal(engine);
    for (std::size_t j = 0; j < steps; ++j) z[L * j + l] = normal(engine);
    normal.reset();
  }
  const double decay = std::exp(-grid.step / tau);
  const double scale = delta * std::sqrt(-std::expm1(-2.0 * grid.step / tau));
  kernels::ou_recurrence(path.lanes, z, decay, scale);
  return path;
}

EnsembleResult ensemble_run(const PulseSet& pulses, const SimConfig& config, unsigned jobs) {
  config.validate(pulses);
  const DephasingParams& dp = config.dephasing;
  EnsembleResult out;
  out.gamma = config.gamma;
  out.realizations = dp.realizations;
  out.master_seed = dp.master_seed;

  if (dp.delta == 0.0) {
    // Every realization is the same deterministic trajectory.
    const TrajectoryRecord rec = propagate(pulses, config);
    out.xi = rec.xi;
    for (int k = 0; k < kLevels; ++k) {
      out.mean[k] = rec.populations[k];
      out.std_error[k].assign(rec.size(), 0.0);
    }
    out.mean_norm = rec.norm;
    out.stderr_norm.assign(rec.size(), 0.0);
    out.final_p3 = rec.final_population(3);
    out.final_p4 = rec.final_population(4);
    out.ratio_of_means = final_branching(rec);
    if (out.ratio_of_means.is_finite()) {
      out.mean_of_ratios = out.ratio_of_means.value;
      out.ratio_samples = dp.realizations;
    }
    return out;
  }

  const NoiseGrid grid = noise_grid(config);
  const auto samples = static_cast<std::size_t>(config.output_samples);
  std::array<std::vector<double>, kSeries> sum;
  std::array<std::vector<double>, kSeries> sumsq;
  for (int s = 0; s < kSeries; ++s) {
    sum[s].assign(samples, 0.0);
    sumsq[s].assign(samples, 0.0);
  }

  const auto total = static_cast<std::size_t>(dp.realizations);
  const std::size_t block = std::max<std::size_t>(16, 4 * static_cast<std::size_t>(jobs));
  std::vector<std::optional<TrajectoryRecord>> slots(block);
  std::size_t ok = 0;
  double ratio_sum = 0.0;
  for (std::size_t b0 = 0; b0 < total; b0 += block) {
    const std::size_t nb = std::min(block, total - b0);
    parallel_for(nb, jobs, [&](std::size_t i) {
      slots[i].reset();
      const NoisePath path = generate_path(dp.delta, dp.tau, grid, derive_seed(dp.master_seed, b0 + i));
      try {
        slots[i] = propagate(pulses, config, &path);
      } catch (const IntegrationError&) {
        // counted as a failure below
      }
    });
    for (std::size_t i = 0; i < nb; ++i) {
      if (!slots[i]) {
        ++out.failures;
        continue;
      }
      const TrajectoryRecord& rec = *slots[i];
      if (out.xi.empty()) out.xi = rec.xi;
      for (int s = 0; s < kSeries; ++s) kernels::accumulate_moments(series_of(rec, s), sum[s], sumsq[s]);
      const BranchingRatio r = final_branching(rec);
      if (r.is_finite()) {
        ratio_sum += r.value;
        ++out.ratio_samples;
      }
      ++ok;
    }
  }
  if (static_cast<double>(out.failures) > 1e-3 * static_cast<double>(total))
    throw Error("ensemble: " + std::to_string(out.failures) + " of " + std::to_string(total) +
                " realizations failed to propagate");

  std::array<std::vector<double>, kSeries> mean;
  std::array<std::vector<double>, kSeries> se;
  for (int s = 0; s < kSeries; ++s) {
    mean[s].assign(samples, 0.0);
    se[s].assign(samples, 0.0);
    if (ok > 1) {
      kernels::finalize_moments(sum[s], sumsq[s], static_cast<double>(ok), mean[s], se[s]);
    } else if (ok == 1) {
      mean[s] = sum[s];
    }
  }
  for (int k = 0; k < kLevels; ++k) {
    out.mean[k] = std::move(mean[k]);
    out.std_error[k] = std::move(se[k]);
  }
  out.mean_norm = std::move(mean[kLevels]);
  out.stderr_norm = std::move(se[kLevels]);
  out.final_p3 = out.mean[2].back();
  out.final_p4 = out.mean[3].back();
  out.stderr_p3 = out.std_error[2].back();
  out.stderr_p4 = out.std_error[3].back();
  out.ratio_of_means = population_ratio(out.final_p3, out.final_p4);
  if (out.ratio_samples > 0) out.mean_of_ratios = ratio_sum / out.ratio_samples;
  return out;
}

void write_ensemble_mean_csv(std::ostream& os, const EnsembleResult& result) {
  write_series_csv(os, result.xi, result.mean, result.mean_norm);
}

void write_ensemble_stderr_csv(std::ostream& os, const EnsembleResult& result) {
  write_series_csv(os, result.xi, result.std_error, result.stderr_norm);
}

std::string ensemble_summary_json(const EnsembleResult& r) {
  nlohmann::ordered_json j;
  j["gamma"] = r.gamma;
  j["final_P3"] = r.final_p3;
  j["final_P4"] = r.final_p4;
  j["stderr_P3"] = r.stderr_p3;
  j["stderr_P4"] = r.stderr_p4;
  if (r.ratio_of_means.is_finite())
    j["B"] = r.ratio_of_means.value;
  else
    j["B"] = r.ratio_of_means.to_string();
  j["B_mean_of_ratios"] = r.mean_of_ratios;
  j["ratio_samples"] = r.ratio_samples;
  j["realizations"] = r.realizations;
  j["failures"] = r.failures;
  j["master_seed"] = r.master_seed;
  return j.dump(2);
}

}  // namespace kr5
