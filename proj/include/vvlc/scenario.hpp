#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vvlc/colorimetry.hpp"
#include "vvlc/geometry.hpp"
#include "vvlc/gnp_optics.hpp"
#include "vvlc/orchestrator.hpp"
#include "vvlc/precoder.hpp"
#include "vvlc/spectral.hpp"

namespace vvlc {

enum class Mode { multiple_access, wiretap };

std::string to_string(Mode m);
Mode mode_from_string(std::string_view s);

struct SpectralConfig {
  double min_nm = 380.0;
  double max_nm = 780.0;
  double step_nm = 5.0;
  LedSpdModel leds;
  ResponsivityModel responsivity;
  ReflectanceModel reflectance;
};

struct SweepConfig {
  std::vector<double> ptx_dbm;  // 0, 5, ..., 60
  double ao_ptx_dbm = 30.0;
  std::vector<double> distance_ptx_dbm = {30.0, 40.0, 50.0, 60.0};
  std::vector<double> target_ber = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> condnum_distances_m;  // 5, 10, ..., 100
  /// Receiver and headlight of the rank-one distance analysis.
  std::size_t distance_receiver = 1;
  std::size_t distance_headlight = 0;
  /// Symbols per κ point of the Monte-Carlo BER column.
  std::size_t ber_symbols = 100000;
};

struct ScenarioConfig {
  Mode mode = Mode::multiple_access;
  Scene scene;
  Radiometry radiometry;
  NoiseModel noise;
  GnpPlate plate;
  SpectralConfig spectral;
  std::vector<double> temperatures;
  QuadrangleTable quadrangles;
  AoOptions optimizer;
  SweepConfig sweep;
  /// Receivers that get a precoder; the others are only protected.
  std::vector<std::size_t> served;
  std::uint64_t seed = 1;

  static ScenarioConfig defaults(Mode mode = Mode::multiple_access);
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Synthetic four-cell plate whose absorption sits in the red and depends on
/// the azimuth with a different phase per cell.
GnpPlate default_plate();

std::string scenario_to_json(const ScenarioConfig& config);

/// Missing keys keep their defaults; unknown keys are rejected with
/// std::invalid_argument.
ScenarioConfig scenario_from_json(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON dump.
std::uint64_t config_hash(const ScenarioConfig& config);
std::string hex_hash(std::uint64_t h);

/// Spectral quantities shared by every link of a scenario.
struct Physics {
  SpectralGrid grid;
  SpdSet spds;
  SpectralFunction responsivity;
  double mean_reflectance = 0.0;
};

Physics build_physics(const ScenarioConfig& config);

/// One problem per headlight at transmit power `ptx_w` (per LED). The path
/// loss includes the reflected path when `include_nlos` is set.
std::vector<HeadlightProblem> build_headlights(const ScenarioConfig& config, const Physics& physics,
                                               const GnpPlate& plate, double ptx_w, bool include_nlos);

/// Same scenario with two receivers, the first served (Bob) and the second
/// protected (Eve). A wiretap configuration is returned unchanged.
ScenarioConfig wiretap_view(const ScenarioConfig& config);

}  // namespace vvlc
