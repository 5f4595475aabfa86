#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kr5/config.hpp"

using namespace kr5;

TEST_CASE("presets") {
  const RunConfig a = preset("fig2a");
  CHECK(a.pulses.pump.peak == 10);
  CHECK(a.pulses.stokes3.peak == 30);
  CHECK(a.pulses.stokes4.peak == 70);
  CHECK(a.pulses.branch3.peak == 30);
  CHECK(a.pulses.branch4.peak == 50);
  CHECK(preset("fig2b").pulses.stokes3.peak == 60);
  CHECK(preset("fig2b").pulses.stokes4.peak == 40);
  const RunConfig f = preset("fig3");
  CHECK(f.pulses.pump.peak == 20);
  CHECK(f.pulses.stokes3.peak == 50);
  CHECK(f.pulses.stokes4.peak == 40);
  CHECK(f.pulses.branch3.peak == 15);
  CHECK(f.pulses.branch4.peak == 75);
  CHECK(f.sim.dephasing.delta == 15);
  CHECK(f.sim.dephasing.tau == 0.02);
  CHECK(f.sim.dephasing.realizations == 1000);
  CHECK(f.scenario.gammas == std::vector<double>{0, 3, 6, 9});
  CHECK_THROWS_AS(preset("fig9"), ValidationError);
  for (const std::string& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
}

TEST_CASE("negative gamma is rejected with a named invariant") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"preset": "fig2a", "gamma": -1})"),
                       "gamma must be >= 0", ValidationError);
}

TEST_CASE("partial configs inherit from a preset") {
  const RunConfig c = parse_config_text(R"({
    "preset": "fig2b",
    "gamma": 900,
    "pulses": {"pump": {"peak": 12}},
    "dephasing": {"seed": 5}
  })");
  CHECK(c.sim.gamma == 900);
  CHECK(c.pulses.pump.peak == 12);
  CHECK(c.pulses.stokes3.peak == 60);
  CHECK(c.pulses.pump.envelope.center == 1.0);
  CHECK(c.sim.dephasing.master_seed == 5);
  CHECK(c.scenario.name == "fig2b");
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_config_text(R"({"gama": 3})"), ValidationError);
  CHECK_THROWS_AS(parse_config_text(R"({"pulses": {"pump": {"height": 3}}})"), ValidationError);
  CHECK_THROWS_AS(parse_config_text(R"({"pulses": {"probe": {}}})"), ValidationError);
}

TEST_CASE("syntax errors report line and column") {
  try {
    parse_config_text("{\n  \"gamma\": 3,\n  \"tolerance\": ,\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 15);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("type errors are validation errors") {
  CHECK_THROWS_AS(parse_config_text(R"({"gamma": "large"})"), ValidationError);
  CHECK_THROWS_AS(parse_config_text(R"({"window": [1]})"), ValidationError);
}

TEST_CASE("materialized config round-trips") {
  RunConfig c = preset("fig3");
  c.sim.gamma = 6;
  c.sim.product_decay = {0.1, 0.2};
  c.sim.dephasing.master_seed = 18446744073709551615ull;
  c.scenario.xi = 0.25;
  const std::string text = to_json(c).dump();
  const RunConfig back = parse_config_text(text);
  CHECK(to_json(back).dump() == text);
  CHECK(back.sim.dephasing.master_seed == 18446744073709551615ull);
}

TEST_CASE("config files") {
  const auto path = std::filesystem::temp_directory_path() / "kr5_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"preset": "fig2a", "gamma": 750})";
  }
  CHECK(parse_config(path).sim.gamma == 750);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(parse_config(path), Error);
}
