#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vvlc/metrics.hpp"
#include "vvlc/orchestrator.hpp"
#include "vvlc/scenario.hpp"

namespace vvlc {

/// Sum-rate variants in output order.
const std::vector<std::string>& sumrate_variants();
/// Secrecy-rate variants in output order.
const std::vector<std::string>& secrecy_variants();
const std::vector<std::string>& experiment_commands();

/// Precoders and ratios of one design, ready for evaluation.
struct Design {
  double kelvin = 0.0;
  PrecoderSet precoders;
  std::vector<Eigen::VectorXd> ratios;
};

/// Runs one named variant at transmit power `ptx_w` per LED.
Design design_variant(const ScenarioConfig& config, const Physics& physics, std::string_view variant, double ptx_w);

/// Effective channels of every receiver under `design`, in the evaluation
/// world (with or without the reflected path).
Evaluation evaluate(const ScenarioConfig& config, const Physics& physics, const Design& design, bool include_nlos,
                    bool transparent_plate, double ptx_w);

struct RatePoint {
  double ptx_dbm = 0.0;
  std::string variant;
  double value = 0.0;
  double bob = 0.0;
  double eve = 0.0;
  double kelvin = 0.0;
};

std::vector<RatePoint> sumrate_sweep(const ScenarioConfig& config, bool include_nlos,
                                     const std::vector<std::string>& variants);

std::vector<RatePoint> secrecy_sweep(const ScenarioConfig& config, bool include_nlos,
                                     const std::vector<std::string>& variants);

struct ConditionPoint {
  double distance_m = 0.0;
  double condition = 0.0;
};

/// cond(H̃) for a receiver at (0, r, z_rx) seen through the first headlight with
/// equal ratios 1/3.
std::vector<ConditionPoint> condition_sweep(const ScenarioConfig& config, std::span<const double> distances_m,
                                            bool include_nlos);

struct DistancePoint {
  double ptx_dbm = 0.0;
  double target_ber = 0.0;
  double kappa = 0.0;
  double distance_m = 0.0;
  double ber_monte_carlo = 0.0;
};

/// Ratios, precoders and σ₂ come from the design at the AO power; only the
/// transmit power in the distance expression follows the sweep.
std::vector<DistancePoint> distance_sweep(const ScenarioConfig& config, bool include_nlos);

/// Monte-Carlo bit error rate of Gray-coded 4-PAM with nearest-symbol
/// detection at the given κ.
double ber_4pam_monte_carlo(double kappa, std::size_t symbols, std::uint64_t seed);

struct ChromaticityPoint {
  std::size_t receiver = 0;
  std::size_t headlight = 0;
  double kelvin = 0.0;
  Chromaticity xy;
};

std::vector<ChromaticityPoint> chromaticity_points(const ScenarioConfig& config);

std::vector<AoTraceRow> ao_trace(const ScenarioConfig& config);

struct ExperimentOptions {
  std::filesystem::path out_dir = ".";
  bool include_nlos = true;
  /// Restricts rate sweeps to one variant when nonempty.
  std::string variant;
  bool svg = false;
};

/// Writes the CSV (and optional SVG) of one command; returns the paths written.
/// Throws std::invalid_argument for an unknown command or variant.
std::vector<std::filesystem::path> run_experiment(const ScenarioConfig& config, std::string_view command,
                                                  const ExperimentOptions& options);

/// Plain polyline chart of named (x, y) series.
struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series, bool log_x = false, bool log_y = false);

}  // namespace vvlc
