#include "kr5/propagator.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

#include "kr5/kernels.hpp"

namespace kr5 {

namespace {

double initial_step(const PulseSet& pulses, const SimConfig& config, const NoisePath* noise) {
  const double peaks[] = {pulses.pump.peak, pulses.stokes3.peak, pulses.stokes4.peak,
                          pulses.branch3.peak, pulses.branch4.peak};
  double omega_m_sq = 0.0;
  for (double p : peaks) omega_m_sq += p * p;
  double rate = std::max({1.0, config.gamma, config.product_decay[0], config.product_decay[1],
                          std::sqrt(omega_m_sq)});
  if (noise != nullptr) rate = std::max(rate, 4.0 * config.dephasing.delta);
  return std::min(config.max_step, 0.1 / rate);
}

StepControl make_control(const PulseSet& pulses, const SimConfig& config,
                         const NoisePath* noise) {
  StepControl ctl;
  ctl.rtol = config.tolerance;
  ctl.atol = 1e-2 * config.tolerance;
  ctl.max_step = config.max_step;
  ctl.h = initial_step(pulses, config, noise);
  return ctl;
}

struct CouplingRhs {
  const PulseSet& pulses;
  void operator()(double xi, const StateVector& y, StateVector& dy) const {
    apply_couplings(envelopes(xi, pulses), y, dy);
  }
};

}  // namespace

StateVector basis_state(int level) {
  if (level < 1 || level > kLevels) throw ValidationError("basis level must be in 1..5");
  StateVector s{};
  s[level - 1] = 1.0;
  return s;
}

double TrajectoryRecord::max_population(int level) const {
  const auto& p = populations[level - 1];
  return p.empty() ? 0.0 : *std::max_element(p.begin(), p.end());
}

StateVector evolve(const PulseSet& pulses, const SimConfig& config, double from, double to,
                   StateVector state, StepControl* control) {
  StepControl local = make_control(pulses, config, nullptr);
  StepControl& ctl = control != nullptr ? *control : local;
  LawsonDopri5<kLevels> integrator(decay_diagonal(config));
  integrator.advance(CouplingRhs{pulses}, from, to, state, ctl);
  return state;
}

TrajectoryRecord propagate(const PulseSet& pulses, const SimConfig& config,
                           const NoisePath* noise, const StateVector& initial) {
  config.validate(pulses);
  if (std::abs(squared_norm(initial) - 1.0) > 1e-9)
    throw ValidationError("initial state must be normalized");

  const Window w = config.window;
  std::size_t node = 0;
  if (noise != nullptr) {
    if (!(noise->step > 0.0) || noise->nodes() == 0)
      throw ValidationError("noise path is empty");
    if (noise->start > w.start || noise->node_time(noise->nodes() - 1) + noise->step < w.end)
      throw ValidationError("noise path does not cover the integration window");
    node = static_cast<std::size_t>(std::floor((w.start - noise->start) / noise->step));
    node = std::min(node, noise->nodes() - 1);
  }

  const auto samples = static_cast<std::size_t>(config.output_samples);
  const double dx = w.length() / static_cast<double>(samples - 1);

  TrajectoryRecord rec;
  rec.config_hash = config_hash(pulses, config);
  if (noise != nullptr) rec.seed = noise->seed;
  rec.xi.resize(samples);
  std::array<std::vector<double>, kLevels> re;
  std::array<std::vector<double>, kLevels> im;
  for (int k = 0; k < kLevels; ++k) {
    re[k].resize(samples);
    im[k].resize(samples);
  }

  StateVector y = initial;
  auto record = [&](std::size_t n, double xi) {
    rec.xi[n] = xi;
    for (int k = 0; k < kLevels; ++k) {
      re[k][n] = y[k].real();
      im[k][n] = y[k].imag();
    }
  };
  record(0, w.start);

  const StateVector base = decay_diagonal(config);
  LawsonDopri5<kLevels> integrator(base);
  StepControl ctl = make_control(pulses, config, noise);
  const CouplingRhs rhs{pulses};

  double xi = w.start;
  std::size_t next = 1;
  while (next < samples) {
    const double t_out =
        next == samples - 1 ? w.end : w.start + static_cast<double>(next) * dx;
    double seg_end = t_out;
    double t_node = 0.0;
    bool node_boundary = false;
    if (noise != nullptr) {
      StateVector diag = base;
      const RealVector5 shifts = noise->level_shifts(node);
      for (int k = 0; k < kLevels; ++k) diag[k] += shifts[k];
      integrator.set_diagonal(diag);
      if (node + 1 < noise->nodes()) {
        t_node = noise->node_time(node + 1);
        if (t_node <= seg_end) {
          seg_end = t_node;
          node_boundary = true;
        }
      }
    }
    integrator.advance(rhs, xi, seg_end, y, ctl);
    xi = seg_end;
    if (node_boundary) ++node;
    if (xi == t_out) record(next++, xi);
  }

  rec.final_state = y;
  rec.steps_accepted = ctl.accepted;
  rec.steps_rejected = ctl.rejected;
  rec.norm.assign(samples, 0.0);
  for (int k = 0; k < kLevels; ++k) {
    rec.populations[k].resize(samples);
    kernels::squared_magnitude(re[k], im[k], rec.populations[k]);
    kernels::add_assign(rec.norm, rec.populations[k]);
  }
  return rec;
}

RealVector5 populations(const StateVector& state) {
  RealVector5 p{};
  for (int k = 0; k < kLevels; ++k) p[k] = std::norm(state[k]);
  return p;
}

BranchingRatio population_ratio(double p3, double p4, double floor) {
  if (p4 < floor) return p3 >= floor ? BranchingRatio::infinite() : BranchingRatio::indeterminate();
  return BranchingRatio::finite(p3 / p4);
}

BranchingRatio final_branching(const TrajectoryRecord& record, double floor) {
  if (record.size() == 0) return BranchingRatio::indeterminate();
  return population_ratio(record.final_population(3), record.final_population(4), floor);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
  os << "xi,P1,P2,P3,P4,P5,norm\n";
  for (std::size_t n = 0; n < record.size(); ++n) {
    os << format_number(record.xi[n]);
    for (int k = 0; k < kLevels; ++k) os << ',' << format_number(record.populations[k][n]);
    os << ',' << format_number(record.norm[n]) << '\n';
  }
}

std::uint64_t config_hash(const PulseSet& pulses, const SimConfig& config) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  auto mix_double = [&mix](double v) { mix(&v, sizeof v); };
  for (const Pulse* p : {&pulses.pump, &pulses.stokes3, &pulses.stokes4, &pulses.branch3,
                         &pulses.branch4}) {
    mix_double(p->peak);
    mix_double(p->envelope.center);
    mix_double(p->envelope.width);
    mix_double(p->envelope.prefactor);
  }
  for (double v : {config.gamma, config.product_decay[0], config.product_decay[1],
                   config.window.start, config.window.end, config.tolerance, config.max_step,
                   config.dephasing.delta, config.dephasing.tau,
                   config.dephasing.refresh_fraction})
    mix_double(v);
  const std::int64_t ints[] = {config.output_samples, config.dephasing.realizations,
                               static_cast<std::int64_t>(config.dephasing.master_seed)};
  mix(ints, sizeof ints);
  return h;
}

}  // namespace kr5
