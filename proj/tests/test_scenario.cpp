#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vvlc/experiment.hpp"
#include "vvlc/scenario.hpp"

using namespace vvlc;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

ScenarioConfig small_config() {
  ScenarioConfig c = ScenarioConfig::defaults();
  c.sweep.ptx_dbm = {20.0, 60.0};
  c.sweep.condnum_distances_m = {10.0, 20.0};
  c.sweep.ber_symbols = 20000;
  return c;
}

}  // namespace

TEST_CASE("defaults follow the reference geometry") {
  const ScenarioConfig c = ScenarioConfig::defaults();
  CHECK_NOTHROW(c.validate());
  CHECK(c.scene.leds_per_headlight == 4);
  CHECK(c.scene.pds_per_receiver == 4);
  CHECK(c.scene.receiver_count() == 3);
  CHECK(c.scene.led_spacing_m == 0.04);
  CHECK(c.scene.pd_spacing_m == 0.01);
  CHECK(c.radiometry.half_power_deg == 20.0);
  CHECK(c.radiometry.modulation_index == 0.5);
  CHECK(c.radiometry.efficiency_w_per_a == 0.44);
  CHECK(c.noise.bandwidth_hz == 1e8);
  CHECK(c.noise.thermal_w == doctest::Approx(dbm_to_watts(-128.76)));
  CHECK(c.temperatures.size() == 8);
  CHECK(c.sweep.ptx_dbm.front() == 0.0);
  CHECK(c.sweep.ptx_dbm.back() == 60.0);
  const ScenarioConfig w = ScenarioConfig::defaults(Mode::wiretap);
  CHECK(w.scene.receiver_count() == 2);
  CHECK(w.served == std::vector<std::size_t>{0});
}

TEST_CASE("JSON round trip keeps the hash") {
  const ScenarioConfig c = ScenarioConfig::defaults();
  const std::string text = scenario_to_json(c);
  const ScenarioConfig back = scenario_from_json(text);
  CHECK(scenario_to_json(back) == text);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(hex_hash(config_hash(c)).size() == 16);
  ScenarioConfig other = c;
  other.seed = 2;
  CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("partial and invalid JSON") {
  const ScenarioConfig c = scenario_from_json(R"({"seed": 9, "noise": {"thermal_dbm": -120}})");
  CHECK(c.seed == 9);
  CHECK(c.noise.thermal_w == doctest::Approx(dbm_to_watts(-120.0)));
  CHECK(c.scene.receiver_count() == 3);
  CHECK_THROWS_AS(scenario_from_json(R"({"sed": 9})"), std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json(R"({"scene": {"leds": 4}})"), std::invalid_argument);
  CHECK_THROWS(scenario_from_json("{"));
  CHECK_THROWS_AS(scenario_from_json(R"({"mode": "broadcast"})"), std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json(R"({"served": [7]})"), std::invalid_argument);
  CHECK_THROWS(load_scenario("/nonexistent/scenario.json"));
}

TEST_CASE("shipped scenario files match the defaults") {
  CHECK(config_hash(load_scenario(VVLC_SOURCE_DIR "/scenarios/default.json")) ==
        config_hash(ScenarioConfig::defaults()));
  CHECK(config_hash(load_scenario(VVLC_SOURCE_DIR "/scenarios/wiretap.json")) ==
        config_hash(ScenarioConfig::defaults(Mode::wiretap)));
}

TEST_CASE("wiretap view") {
  const ScenarioConfig w = wiretap_view(ScenarioConfig::defaults());
  CHECK(w.mode == Mode::wiretap);
  CHECK(w.scene.receiver_count() == 2);
  CHECK(w.served == std::vector<std::size_t>{0});
  CHECK(mode_from_string(to_string(Mode::wiretap)) == Mode::wiretap);
}

TEST_CASE("headlight problems") {
  const ScenarioConfig c = ScenarioConfig::defaults();
  const Physics ph = build_physics(c);
  CHECK(ph.mean_reflectance == doctest::Approx(0.91));
  const auto hl = build_headlights(c, ph, c.plate, 1.0, true);
  REQUIRE(hl.size() == 2);
  CHECK(hl[0].links.size() == 3);
  CHECK_NOTHROW(hl[0].validate());
  CHECK(hl[0].links[0].gain.cols() == 12);
  // The plate makes the receivers see different gains.
  CHECK((hl[0].links[0].gain - hl[0].links[2].gain).norm() > 1e-3 * hl[0].links[0].gain.norm());
}

TEST_CASE("experiment outputs") {
  const ScenarioConfig c = small_config();
  const auto dir = std::filesystem::temp_directory_path() / "vvlc_experiment_test";
  std::filesystem::remove_all(dir);
  ExperimentOptions opts;
  opts.out_dir = dir;
  opts.svg = true;

  const auto files = run_experiment(c, "sumrate", opts);
  REQUIRE(files.size() == 2);
  const std::string csv = slurp(dir / "sumrate.csv");
  CHECK(csv.rfind("# config_hash=" + hex_hash(config_hash(c)) + " seed=1\nptx_dbm,variant,sum_rate_bpshz\n", 0) == 0);
  for (const auto& v : sumrate_variants()) CHECK(csv.find("," + v + ",") != std::string::npos);
  CHECK(slurp(dir / "sumrate.svg").find("<polyline") != std::string::npos);

  opts.svg = false;
  opts.variant = "slnr_gnp_ao";
  opts.include_nlos = false;
  run_experiment(c, "sumrate", opts);
  const std::string los = slurp(dir / "sumrate.csv");
  CHECK(los.find("mrt_gnp") == std::string::npos);
  opts.variant = "zf";
  CHECK_THROWS_AS(run_experiment(c, "sumrate", opts), std::invalid_argument);
  opts.variant.clear();
  CHECK_THROWS_AS(run_experiment(c, "plot", opts), std::invalid_argument);

  run_experiment(c, "chromaticity", opts);
  CHECK(slurp(dir / "chromaticity.csv").find("\nu,i,K_selected,x,y\n") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("identical config and seed give identical files") {
  const ScenarioConfig c = small_config();
  const auto a = std::filesystem::temp_directory_path() / "vvlc_det_a";
  const auto b = std::filesystem::temp_directory_path() / "vvlc_det_b";
  for (const auto& cmd : {"condnum", "ber-distance", "ao-trace"}) {
    ExperimentOptions oa, ob;
    oa.out_dir = a, ob.out_dir = b;
    const auto fa = run_experiment(c, cmd, oa);
    const auto fb = run_experiment(c, cmd, ob);
    REQUIRE(fa.size() == fb.size());
    for (std::size_t k = 0; k < fa.size(); ++k) CHECK(slurp(fa[k]) == slurp(fb[k]));
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
