#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kr5/model.hpp"

namespace kr5 {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct SweepSpec {
  double min = 1.0;
  double max = 3000.0;
  int points = 60;
};

/// Scenario-level settings consumed by the experiment subcommands.
struct ScenarioConfig {
  std::string name = "custom";
  SweepSpec sweep;
  std::vector<double> gammas{0.0, 3.0, 6.0, 9.0};
  std::vector<double> zeno_multipliers{1.0, 10.0, 100.0};
  double xi = 0.5;
};

struct RunConfig {
  PulseSet pulses;
  SimConfig sim;
  ScenarioConfig scenario;

  void validate() const;
};

std::vector<std::string> preset_names();
/// Built-in `fig2a`, `fig2b`, `fig3`. Throws ValidationError for unknown names.
RunConfig preset(std::string_view name);

/// Parses JSON text; keys absent from the text keep their defaults (or those of
/// a top-level "preset"). Unknown keys are rejected.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

/// Fully materialized configuration; parse_config_text(to_json(c).dump()) == c.
nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace kr5
