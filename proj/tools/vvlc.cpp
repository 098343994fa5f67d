#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vvlc/experiment.hpp"
#include "vvlc/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Vehicular VLC precoding and color-ratio experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::string mode;
  std::uint64_t seed = 0;
  bool seed_set = false;
  vvlc::ExperimentOptions opts;
  bool no_nlos = false;

  app.add_option("--config", config_path, "Scenario JSON (defaults when omitted)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--mode", mode, "multiple_access or wiretap, for the built-in defaults")
      ->check(CLI::IsMember({"multiple_access", "wiretap"}));
  app.add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t s) { seed = s, seed_set = true; }, "Random seed");
  app.add_flag("--no-nlos", no_nlos, "Evaluate with line-of-sight paths only");
  app.add_option("--variant", opts.variant, "Restrict rate sweeps to one variant");
  app.add_flag("--svg", opts.svg, "Also write SVG line plots");

  for (const auto& c : vvlc::experiment_commands()) app.add_subcommand(c, "Run the " + c + " experiment");
  auto* dump = app.add_subcommand("dump-config", "Print the effective scenario JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    vvlc::ScenarioConfig config = config_path.empty()
                                      ? vvlc::ScenarioConfig::defaults(mode.empty() ? vvlc::Mode::multiple_access
                                                                                    : vvlc::mode_from_string(mode))
                                      : vvlc::load_scenario(config_path);
    if (seed_set) config.seed = seed;
    config.validate();
    if (dump->parsed()) {
      std::cout << vvlc::scenario_to_json(config) << '\n';
      return 0;
    }
    opts.out_dir = out_dir;
    opts.include_nlos = !no_nlos;
    const std::string command = app.get_subcommands().front()->get_name();
    for (const auto& p : vvlc::run_experiment(config, command, opts)) std::cout << p.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
