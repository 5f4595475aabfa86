// kr5: command-line front end for the five-level measurement-assisted control
// simulator. Every run writes its outputs, the resolved config.json and a
// manifest.json into one output directory.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kr5/adiabatic.hpp"
#include "kr5/config.hpp"
#include "kr5/dephasing.hpp"
#include "kr5/experiments.hpp"
#include "kr5/kernels.hpp"
#include "kr5/parallel.hpp"
#include "kr5/propagator.hpp"
#include "kr5/spectrum.hpp"

namespace fs = std::filesystem;
using namespace kr5;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string subcommand;
  std::string preset;
  std::string config;
  std::optional<double> gamma;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<double> tol;
  std::optional<double> xi;
  unsigned jobs = default_jobs();
  std::string out;
  bool plot = false;
};

RunConfig resolve(const Options& o) {
  RunConfig c = o.config.empty() ? preset(o.preset) : parse_config(o.config);
  if (o.gamma) {
    c.sim.gamma = *o.gamma;
    c.scenario.gammas = {*o.gamma};
  }
  if (o.seed) c.sim.dephasing.master_seed = *o.seed;
  if (o.realizations) c.sim.dephasing.realizations = *o.realizations;
  if (o.tol) c.sim.tolerance = *o.tol;
  if (o.xi) c.scenario.xi = *o.xi;
  c.validate();
  return c;
}

class Outputs {
 public:
  Outputs(const Options& o, const RunConfig& c) {
    if (!o.out.empty()) {
      dir_ = o.out;
    } else {
      const char* root = std::getenv("KR5_OUTPUT_ROOT");
      dir_ = fs::path(root != nullptr ? root : "kr5-output") / (o.subcommand + "-" + c.scenario.name);
    }
    fs::create_directories(dir_);
  }

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    return f;
  }

  void write(const std::string& name, const std::string& text) { open(name) << text; }

  void finish(const Options& o, const RunConfig& c, const std::vector<std::string>& argv) {
    write("config.json", to_json(c).dump(2) + "\n");
    nlohmann::ordered_json m;
    m["tool"] = "kr5";
    m["version"] = kVersion;
    m["subcommand"] = o.subcommand;
    m["arguments"] = argv;
    m["master_seed"] = c.sim.dephasing.master_seed;
    m["config"] = to_json(c);
    m["outputs"] = files_;
    m["reproduce"] = "kr5 " + o.subcommand + " --config " + (dir_ / "config.json").string();
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
    std::cout << "outputs written to " << dir_.string() << "\n";
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string num(double v) { return format_number(v); }

std::string gamma_tag(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

std::string complex_str(Complex z) {
  std::ostringstream os;
  os << num(z.real()) << (z.imag() < 0 ? " - " : " + ") << num(std::abs(z.imag())) << "i";
  return os.str();
}

const char* kSweepPlot = R"(import csv, sys
import matplotlib.pyplot as plt
rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "sweep.csv")))
g = [float(r["gamma"]) for r in rows if float(r["gamma"]) > 0]
def col(name):
    return [float(r[name]) for r in rows if float(r["gamma"]) > 0]
plt.semilogx(g, col("P3_exact"), "o", label="P3 exact")
plt.semilogx(g, col("P4_exact"), "s", label="P4 exact")
plt.semilogx(g, col("P3_theory"), "-", label="P3 theory")
plt.semilogx(g, col("P4_theory"), "--", label="P4 theory")
plt.xlabel("Gamma T"); plt.ylabel("final population"); plt.legend()
plt.savefig("sweep.png", dpi=150)
)";

const char* kTrajectoryPlot = R"(import csv
import matplotlib.pyplot as plt
rows = list(csv.DictReader(open("trajectory.csv")))
xi = [float(r["xi"]) for r in rows]
for k in range(1, 6):
    plt.plot(xi, [float(r["P%d" % k]) for r in rows], label="P%d" % k)
plt.xlabel("t/T"); plt.ylabel("population"); plt.legend()
plt.savefig("trajectory.png", dpi=150)
)";

const char* kDephasingPlot = R"(import csv, glob
import matplotlib.pyplot as plt
files = sorted(glob.glob("mean_gamma_*.csv"))
fig, axes = plt.subplots(1, len(files), figsize=(4 * len(files), 3), squeeze=False)
for ax, f in zip(axes[0], files):
    rows = list(csv.DictReader(open(f)))
    xi = [float(r["xi"]) for r in rows]
    ax.plot(xi, [float(r["P3"]) for r in rows], label="P3")
    ax.plot(xi, [float(r["P4"]) for r in rows], label="P4")
    ax.set_title(f[len("mean_"):-4]); ax.set_xlabel("t/T"); ax.legend()
plt.tight_layout(); plt.savefig("dephasing.png", dpi=150)
)";

void run_propagate(const Options& o, const RunConfig& c, Outputs& out) {
  std::optional<NoisePath> noise;
  if (c.sim.dephasing.delta > 0.0)
    noise = generate_path(c.sim.dephasing.delta, c.sim.dephasing.tau, noise_grid(c.sim),
                          derive_seed(c.sim.dephasing.master_seed, 0));
  const TrajectoryRecord rec = propagate(c.pulses, c.sim, noise ? &*noise : nullptr);
  auto csv = out.open("trajectory.csv");
  write_trajectory_csv(csv, rec);
  nlohmann::ordered_json s;
  s["gamma"] = c.sim.gamma;
  for (int k = 1; k <= kLevels; ++k) s["final_P" + std::to_string(k)] = rec.final_population(k);
  s["final_norm"] = rec.norm.back();
  s["B"] = final_branching(rec).to_string();
  s["max_P2"] = rec.max_population(2);
  s["steps_accepted"] = rec.steps_accepted;
  s["steps_rejected"] = rec.steps_rejected;
  s["config_hash"] = rec.config_hash;
  out.write("summary.json", s.dump(2) + "\n");
  std::cout << "final P3 = " << num(rec.final_population(3)) << ", P4 = "
            << num(rec.final_population(4)) << ", B = " << final_branching(rec).to_string() << "\n";
  if (o.plot) out.write("plot_trajectory.py", kTrajectoryPlot);
}

void run_eigen(const Options&, const RunConfig& c, Outputs& out) {
  const double xi = c.scenario.xi;
  const RabiValues r = envelopes(xi, c.pulses);
  const Matrix5c hr = resonant_hamiltonian(r).cast<Complex>();
  const EigenSystem analytic = hr_spectrum(r).as_eigensystem();
  nlohmann::ordered_json j;
  j["xi"] = xi;
  j["provenance"] = to_string(analytic.provenance);
  std::cout << "H_r eigensystem at xi = " << xi << " (" << to_string(analytic.provenance) << ")\n";
  std::cout << "  k  lambda                residual\n";
  for (int k = 0; k < kLevels; ++k) {
    const double res = (hr * analytic.vectors[k] - analytic.values[k] * analytic.vectors[k]).norm();
    std::cout << "  " << k + 1 << "  " << num(analytic.values[k].real()) << "  " << num(res) << "\n";
    j["eigenvalues"].push_back(analytic.values[k].real());
    j["residuals"].push_back(res);
  }
  const EigenSystem oracle = numeric_oracle(hr);
  std::cout << "numeric oracle residual: " << num(oracle.residual) << "\n";
  j["oracle_residual"] = oracle.residual;

  if (c.sim.gamma > 0.0) {
    const StrongPair sp = strong_limit_pair(xi, c.pulses, c.sim.gamma);
    const WeakSpectrum ws = weak_limit_spectrum(xi, c.pulses, c.sim.gamma);
    const EigenSystem full = numeric_oracle(assemble_hamiltonian(xi, c.pulses, c.sim));
    std::cout << "strong-measurement lambda_2' = " << complex_str(sp.lambda)
              << (sp.in_regime ? "" : "  (outside Gamma >> Omega)") << "\n";
    std::cout << "weak-measurement lambda_k'':" << (ws.in_regime ? "" : "  (outside Gamma << Omega)")
              << "\n";
    for (const Complex& z : ws.values) std::cout << "  " << complex_str(z) << "\n";
    std::cout << "full H eigenvalues (numeric oracle):\n";
    for (const Complex& z : full.values) std::cout << "  " << complex_str(z) << "\n";
    j["strong_lambda2"] = {sp.lambda.real(), sp.lambda.imag()};
    for (const Complex& z : ws.values) j["weak_lambda"].push_back({z.real(), z.imag()});
    for (const Complex& z : full.values) j["full_oracle"].push_back({z.real(), z.imag()});
  }
  out.write("eigen.json", j.dump(2) + "\n");
}

std::vector<double> sweep_grid(const RunConfig& c) {
  std::vector<double> g = log_grid(c.scenario.sweep.min, c.scenario.sweep.max, c.scenario.sweep.points);
  g.insert(g.begin(), 0.0);
  return g;
}

void summarize_sweep(const SweepResult& sweep, std::ostream& os) {
  const SweepRow* min3 = nullptr;
  const SweepRow* min4 = nullptr;
  for (const SweepRow& r : sweep.rows) {
    if (!r.error.empty()) continue;
    if (min3 == nullptr || r.p3_exact < min3->p3_exact) min3 = &r;
    if (min4 == nullptr || r.p4_exact < min4->p4_exact) min4 = &r;
  }
  os << "scenario: " << sweep.scenario << "\n";
  os << "points: " << sweep.rows.size() << "\n";
  if (min3 != nullptr)
    os << "min P3: " << num(min3->p3_exact) << " at gamma " << num(min3->gamma) << " (P4 "
       << num(min3->p4_exact) << ")\n";
  if (min4 != nullptr)
    os << "min P4: " << num(min4->p4_exact) << " at gamma " << num(min4->gamma) << " (P3 "
       << num(min4->p3_exact) << ")\n";
  for (const SweepRow& r : sweep.rows)
    if (!r.error.empty()) os << "error at gamma " << num(r.gamma) << ": " << r.error << "\n";
}

void run_sweep(const Options& o, const RunConfig& c, Outputs& out) {
  const SweepResult sweep = gamma_sweep(c.pulses, sweep_grid(c), c.sim, o.jobs, c.scenario.name);
  auto csv = out.open("sweep.csv");
  write_sweep_csv(csv, sweep);
  std::ostringstream s;
  summarize_sweep(sweep, s);
  out.write("summary.txt", s.str());
  std::cout << s.str();
  if (o.plot) out.write("plot_sweep.py", kSweepPlot);
}

void run_theory_vs_exact(const Options& o, const RunConfig& c, Outputs& out) {
  const SweepResult sweep = gamma_sweep(c.pulses, sweep_grid(c), c.sim, o.jobs, c.scenario.name);
  auto csv = out.open("sweep.csv");
  write_sweep_csv(csv, sweep);
  auto cmp = out.open("comparison.csv");
  cmp << "gamma,dP3,dP4,asserted\n";
  double max3 = 0.0;
  double max4 = 0.0;
  for (const SweepRow& r : sweep.rows) {
    const double d3 = std::abs(r.p3_exact - r.p3_theory);
    const double d4 = std::abs(r.p4_exact - r.p4_theory);
    const bool asserted = r.gamma >= 100.0 && r.gamma <= 2000.0;
    cmp << num(r.gamma) << ',' << num(d3) << ',' << num(d4) << ',' << (asserted ? 1 : 0) << '\n';
    if (asserted) {
      max3 = std::max(max3, d3);
      max4 = std::max(max4, d4);
    }
  }
  std::ostringstream s;
  s << "scenario: " << c.scenario.name << "\n";
  s << "max |P3_exact - P3_theory| over gamma in [100, 2000]: " << num(max3) << "\n";
  s << "max |P4_exact - P4_theory| over gamma in [100, 2000]: " << num(max4) << "\n";
  out.write("summary.txt", s.str());
  std::cout << s.str();
  if (o.plot) out.write("plot_sweep.py", kSweepPlot);
}

void run_zeno(const Options& o, const RunConfig& c, Outputs& out) {
  const ZenoProbe z = zeno_limit_probe(c.pulses, c.sim, c.scenario.zeno_multipliers, o.jobs);
  auto csv = out.open("zeno.csv");
  csv << "gamma,B\n";
  for (std::size_t i = 0; i < z.gammas.size(); ++i)
    csv << num(z.gammas[i]) << ',' << z.ratios[i].to_string() << '\n';
  std::ostringstream s;
  s << "scenario: " << c.scenario.name << "\n";
  s << "extrapolated B(Gamma -> inf): " << num(z.extrapolated) << "\n";
  s << "four-level oracle B: " << z.four_level.to_string() << "\n";
  s << "S3^2/S4^2: " << z.stokes_ratio.to_string() << "\n";
  s << "monotone approach: " << (z.monotone ? "yes" : "no") << "\n";
  out.write("summary.txt", s.str());
  std::cout << s.str();
}

void run_dephasing(const Options& o, const RunConfig& c, Outputs& out) {
  const std::vector<EnsembleResult> results =
      dephasing_study(c.pulses, c.scenario.gammas, c.sim, o.jobs);
  std::string json = "[\n";
  std::ostringstream s;
  s << "scenario: " << c.scenario.name << "\n";
  s << "gamma  final_P3  final_P4  B  B_mean_of_ratios  N  seed\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const EnsembleResult& r = results[i];
    const std::string tag = gamma_tag(r.gamma);
    auto mean = out.open("mean_gamma_" + tag + ".csv");
    write_ensemble_mean_csv(mean, r);
    auto se = out.open("stderr_gamma_" + tag + ".csv");
    write_ensemble_stderr_csv(se, r);
    json += ensemble_summary_json(r) + (i + 1 < results.size() ? ",\n" : "\n");
    s << tag << "  " << num(r.final_p3) << "  " << num(r.final_p4) << "  "
      << (r.ratio_of_means.is_finite() ? num(r.ratio_of_means.value) : r.ratio_of_means.to_string())
      << "  " << num(r.mean_of_ratios) << "  " << r.realizations << "  " << r.master_seed << "\n";
  }
  json += "]\n";
  out.write("summary.json", json);
  out.write("summary.txt", s.str());
  std::cout << s.str();
  if (o.plot) out.write("plot_dephasing.py", kDephasingPlot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Five-level measurement-assisted coherent control simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  struct Sub {
    const char* name;
    const char* help;
    const char* default_preset;
    bool gamma, seeded, ensemble, xi;
  };
  const Sub subs[] = {
      {"propagate", "Propagate one trajectory and export populations", "fig2a", true, true, false, false},
      {"eigen", "Analytic, perturbative and numeric eigensystems at one time", "fig2a", true, false, false, true},
      {"sweep-gamma", "Final yields versus measurement strength", "fig2a", false, false, false, false},
      {"dephasing", "Dephasing ensembles for a list of measurement strengths", "fig3", true, true, true, false},
      {"zeno-probe", "Large-Gamma limit of the branching ratio", "fig2a", false, false, false, false},
      {"theory-vs-exact", "Two-level theory against direct propagation", "fig2a", false, false, false, false},
  };
  for (const Sub& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    cmd->add_option("--preset", o.preset, "Built-in scenario: fig2a, fig2b, fig3")
        ->check(CLI::IsMember(preset_names()));
    cmd->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Output directory (default $KR5_OUTPUT_ROOT/<subcommand>-<scenario>)");
    cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", o.tol, "Integrator relative tolerance");
    cmd->add_flag("--plot", o.plot, "Also write matplotlib scripts for the CSVs");
    if (s.gamma) cmd->add_option("--gamma", o.gamma, "Measurement strength Gamma*T");
    if (s.seeded) cmd->add_option("--seed", o.seed, "Master seed for the noise");
    if (s.ensemble) cmd->add_option("-n,--realizations", o.realizations, "Ensemble size");
    if (s.xi) cmd->add_option("--xi", o.xi, "Dimensionless time t/T");
    cmd->callback([&o, s] {
      o.subcommand = s.name;
      if (o.preset.empty()) o.preset = s.default_preset;
    });
  }
  app.footer("Environment: KR5_OUTPUT_ROOT sets the default output root; KR5_SIMD=scalar disables AVX2 kernels.");

  CLI11_PARSE(app, argc, argv);
  const std::vector<std::string> args(argv, argv + argc);

  try {
    const RunConfig c = resolve(o);
    Outputs out(o, c);
    if (o.subcommand == "propagate") run_propagate(o, c, out);
    else if (o.subcommand == "eigen") run_eigen(o, c, out);
    else if (o.subcommand == "sweep-gamma") run_sweep(o, c, out);
    else if (o.subcommand == "theory-vs-exact") run_theory_vs_exact(o, c, out);
    else if (o.subcommand == "zeno-probe") run_zeno(o, c, out);
    else if (o.subcommand == "dephasing") run_dephasing(o, c, out);
    out.finish(o, c, args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
