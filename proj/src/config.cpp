#include "kr5/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace kr5 {

namespace {

using Json = nlohmann::json;

void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.contains(key))
      throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + "." + key + " has the wrong type");
  }
}

void read_pulse(const Json& obj, Pulse& p, const std::string& where) {
  reject_unknown(obj, {"peak", "center", "width", "prefactor"}, where);
  read(obj, "peak", p.peak, where);
  read(obj, "center", p.envelope.center, where);
  read(obj, "width", p.envelope.width, where);
  read(obj, "prefactor", p.envelope.prefactor, where);
}

Json pulse_json(const Pulse& p) {
  nlohmann::ordered_json j;
  j["peak"] = p.peak;
  j["center"] = p.envelope.center;
  j["width"] = p.envelope.width;
  j["prefactor"] = p.envelope.prefactor;
  return j;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

void RunConfig::validate() const {
  sim.validate(pulses);
  if (!(scenario.sweep.min > 0.0) || !(scenario.sweep.max > scenario.sweep.min))
    throw ValidationError("sweep range must satisfy 0 < min < max");
  if (scenario.sweep.points < 2) throw ValidationError("sweep points must be >= 2");
  if (scenario.gammas.empty()) throw ValidationError("gammas must be nonempty");
  for (double g : scenario.gammas)
    if (!(g >= 0.0)) throw ValidationError("gamma must be >= 0");
  for (double m : scenario.zeno_multipliers)
    if (!(m > 0.0)) throw ValidationError("zeno multipliers must be > 0");
}

std::vector<std::string> preset_names() { return {"fig2a", "fig2b", "fig3"}; }

RunConfig preset(std::string_view name) {
  RunConfig c;
  c.scenario.name = std::string(name);
  if (name == "fig2a") {
    c.pulses = PulseSet::standard(10.0, 30.0, 70.0, 30.0, 50.0);
  } else if (name == "fig2b") {
    c.pulses = PulseSet::standard(10.0, 60.0, 40.0, 30.0, 50.0);
  } else if (name == "fig3") {
    c.pulses = PulseSet::standard(20.0, 50.0, 40.0, 15.0, 75.0);
    c.sim.dephasing.delta = 15.0;
    c.sim.dephasing.tau = 0.02;
    c.sim.dephasing.realizations = 1000;
    c.sim.dephasing.master_seed = 20040101;
    c.scenario.gammas = {0.0, 3.0, 6.0, 9.0};
  } else {
    throw ValidationError("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

RunConfig parse_config_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::ostringstream os;
    os << "parse error at line " << line << ", column " << column << ": " << e.what();
    throw ParseError(os.str(), line, column);
  }
  reject_unknown(j,
                 {"preset", "scenario", "pulses", "gamma", "product_decay", "window", "tolerance",
                  "max_step", "output_samples", "dephasing"},
                 "config");

  RunConfig c;
  if (auto it = j.find("preset"); it != j.end()) {
    if (!it->is_string()) throw ValidationError("config.preset must be a string");
    c = preset(it->get<std::string>());
  }
  if (auto it = j.find("pulses"); it != j.end()) {
    reject_unknown(*it, {"pump", "stokes3", "stokes4", "branch3", "branch4"}, "pulses");
    const std::pair<const char*, Pulse*> all[] = {{"pump", &c.pulses.pump},
                                                  {"stokes3", &c.pulses.stokes3},
                                                  {"stokes4", &c.pulses.stokes4},
                                                  {"branch3", &c.pulses.branch3},
                                                  {"branch4", &c.pulses.branch4}};
    for (const auto& [key, pulse] : all)
      if (auto p = it->find(key); p != it->end()) read_pulse(*p, *pulse, std::string("pulses.") + key);
  }
  read(j, "gamma", c.sim.gamma, "config");
  read(j, "product_decay", c.sim.product_decay, "config");
  if (auto it = j.find("window"); it != j.end()) {
    std::array<double, 2> w{};
    read(j, "window", w, "config");
    c.sim.window = {w[0], w[1]};
  }
  read(j, "tolerance", c.sim.tolerance, "config");
  read(j, "max_step", c.sim.max_step, "config");
  read(j, "output_samples", c.sim.output_samples, "config");
  if (auto it = j.find("dephasing"); it != j.end()) {
    reject_unknown(*it, {"delta", "tau", "realizations", "seed", "refresh_fraction"}, "dephasing");
    read(*it, "delta", c.sim.dephasing.delta, "dephasing");
    read(*it, "tau", c.sim.dephasing.tau, "dephasing");
    read(*it, "realizations", c.sim.dephasing.realizations, "dephasing");
    read(*it, "seed", c.sim.dephasing.master_seed, "dephasing");
    read(*it, "refresh_fraction", c.sim.dephasing.refresh_fraction, "dephasing");
  }
  if (auto it = j.find("scenario"); it != j.end()) {
    reject_unknown(*it, {"name", "sweep", "gammas", "zeno_multipliers", "xi"}, "scenario");
    read(*it, "name", c.scenario.name, "scenario");
    if (auto s = it->find("sweep"); s != it->end()) {
      reject_unknown(*s, {"min", "max", "points"}, "scenario.sweep");
      read(*s, "min", c.scenario.sweep.min, "scenario.sweep");
      read(*s, "max", c.scenario.sweep.max, "scenario.sweep");
      read(*s, "points", c.scenario.sweep.points, "scenario.sweep");
    }
    read(*it, "gammas", c.scenario.gammas, "scenario");
    read(*it, "zeno_multipliers", c.scenario.zeno_multipliers, "scenario");
    read(*it, "xi", c.scenario.xi, "scenario");
  }
  c.validate();
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = {{"name", c.scenario.name},
                   {"sweep",
                    {{"min", c.scenario.sweep.min},
                     {"max", c.scenario.sweep.max},
                     {"points", c.scenario.sweep.points}}},
                   {"gammas", c.scenario.gammas},
                   {"zeno_multipliers", c.scenario.zeno_multipliers},
                   {"xi", c.scenario.xi}};
  j["pulses"] = {{"pump", pulse_json(c.pulses.pump)},
                 {"stokes3", pulse_json(c.pulses.stokes3)},
                 {"stokes4", pulse_json(c.pulses.stokes4)},
                 {"branch3", pulse_json(c.pulses.branch3)},
                 {"branch4", pulse_json(c.pulses.branch4)}};
  j["gamma"] = c.sim.gamma;
  j["product_decay"] = c.sim.product_decay;
  j["window"] = {c.sim.window.start, c.sim.window.end};
  j["tolerance"] = c.sim.tolerance;
  j["max_step"] = c.sim.max_step;
  j["output_samples"] = c.sim.output_samples;
  j["dephasing"] = {{"delta", c.sim.dephasing.delta},
                    {"tau", c.sim.dephasing.tau},
                    {"realizations", c.sim.dephasing.realizations},
                    {"seed", c.sim.dephasing.master_seed},
                    {"refresh_fraction", c.sim.dephasing.refresh_fraction}};
  return j;
}

}  // namespace kr5
