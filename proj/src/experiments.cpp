#include "kr5/experiments.hpp"

#include <cmath>
#include <ostream>

#include "kr5/parallel.hpp"

namespace kr5 {

TheoryYields theory_yields(const PulseSet& pulses, double gamma, const Window& window,
                           double tolerance) {
  TheoryYields out;
  const RabiValues end = envelopes(window.end, pulses);
  Vector5c psi = null_eigenvector(end).cast<Complex>();
  if (gamma > 0.0) {
    TwoLevelOptions opts;
    opts.tolerance = tolerance;
    opts.samples = 2;
    const TwoLevelResult tl = integrate_two_level(pulses, gamma, window, opts);
    out.c1 = tl.final.c1;
    out.c2 = tl.final.c2;
    psi = out.c1 * psi + out.c2 * strong_limit_pair(end, gamma).vector;
  }
  out.p3 = std::norm(psi(2));
  out.p4 = std::norm(psi(3));
  out.ratio = branching_ratio_theory(out.c1, out.c2, pulses);
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ValidationError("log grid needs 0 < lo < hi, n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

SweepResult gamma_sweep(const PulseSet& pulses, const std::vector<double>& gammas,
                        const SimConfig& config, unsigned jobs, std::string scenario) {
  if (gammas.empty()) throw ValidationError("gamma grid is empty");
  for (std::size_t i = 1; i < gammas.size(); ++i)
    if (!(gammas[i] > gammas[i - 1])) throw ValidationError("gamma grid must be strictly increasing");
  config.validate(pulses);

  SweepResult out;
  out.scenario = std::move(scenario);
  out.rows.resize(gammas.size());
  parallel_for(gammas.size(), jobs, [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    row.gamma = gammas[i];
    row.regime = classify_regime(pulses, row.gamma);
    SimConfig c = config;
    c.gamma = row.gamma;
    try {
      const TrajectoryRecord rec = propagate(pulses, c);
      row.p3_exact = rec.final_population(3);
      row.p4_exact = rec.final_population(4);
      row.b_exact = final_branching(rec);
      row.max_p2 = rec.max_population(2);
    } catch (const Error& e) {
      row.error = std::string("exact: ") + e.what();
    }
    try {
      const TheoryYields t = theory_yields(pulses, row.gamma, c.window, c.tolerance);
      row.p3_theory = t.p3;
      row.p4_theory = t.p4;
      row.b_theory = t.ratio;
    } catch (const Error& e) {
      if (!row.error.empty()) row.error += "; ";
      row.error += std::string("theory: ") + e.what();
    }
  });
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.empty()) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "gamma,P3_exact,P4_exact,B_exact,P3_theory,P4_theory,B_theory,max_P2,regime,error\n";
  auto ratio = [](const BranchingRatio& b) {
    return b.is_finite() ? format_number(b.value) : b.to_string();
  };
  for (const SweepRow& r : sweep.rows) {
    os << format_number(r.gamma) << ',' << format_number(r.p3_exact) << ','
       << format_number(r.p4_exact) << ',' << ratio(r.b_exact) << ','
       << format_number(r.p3_theory) << ',' << format_number(r.p4_theory) << ','
       << ratio(r.b_theory) << ',' << format_number(r.max_p2) << ',' << to_string(r.regime)
       << ',' << csv_field(r.error) << '\n';
  }
}

std::vector<EnsembleResult> dephasing_study(const PulseSet& pulses,
                                            const std::vector<double>& gammas,
                                            const SimConfig& config, unsigned jobs) {
  std::vector<EnsembleResult> out;
  out.reserve(gammas.size());
  for (double g : gammas) {
    SimConfig c = config;
    c.gamma = g;
    out.push_back(ensemble_run(pulses, c, jobs));
  }
  return out;
}

BranchingRatio four_level_branching(const PulseSet& pulses, const SimConfig& config) {
  // With no branch couplings |5> is never populated from |1>, which is
  // exactly the system with row and column 5 deleted.
  PulseSet four = pulses;
  four.branch3.peak = 0.0;
  four.branch4.peak = 0.0;
  SimConfig c = config;
  c.gamma = 0.0;
  return final_branching(propagate(four, c));
}

ZenoProbe zeno_limit_probe(const PulseSet& pulses, const SimConfig& config,
                           const std::vector<double>& multipliers, unsigned jobs) {
  ZenoProbe out;
  const double om = pulses.max_peak();
  for (double m : multipliers) out.gammas.push_back(m * om * om);
  out.ratios.resize(out.gammas.size());
  parallel_for(out.gammas.size(), jobs, [&](std::size_t i) {
    SimConfig c = config;
    c.gamma = out.gammas[i];
    out.ratios[i] = final_branching(propagate(pulses, c));
  });
  out.four_level = four_level_branching(pulses, config);
  const double s3 = pulses.stokes3.peak;
  const double s4 = pulses.stokes4.peak;
  if (s4 != 0.0)
    out.stokes_ratio = BranchingRatio::finite(s3 * s3 / (s4 * s4));
  else
    out.stokes_ratio = s3 == 0.0 ? BranchingRatio::indeterminate() : BranchingRatio::infinite();

  const std::size_t n = out.ratios.size();
  if (n >= 2 && out.ratios[n - 1].is_finite() && out.ratios[n - 2].is_finite()) {
    const double g1 = out.gammas[n - 2], g2 = out.gammas[n - 1];
    const double b1 = out.ratios[n - 2].value, b2 = out.ratios[n - 1].value;
    out.extrapolated = (g2 * b2 - g1 * b1) / (g2 - g1);
  } else if (n >= 1) {
    out.extrapolated = out.ratios.back().as_double();
  }
  if (out.four_level.is_finite()) {
    double prev = INFINITY;
    for (const BranchingRatio& b : out.ratios) {
      const double d = std::abs(b.as_double() - out.four_level.value);
      if (!(d <= prev)) out.monotone = false;
      prev = d;
    }
  }
  return out;
}

}  // namespace kr5
