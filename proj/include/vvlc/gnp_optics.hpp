#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vvlc/spectral.hpp"

namespace vvlc {

/// Left/right circular transmittance and differential phase delay (radians)
/// of a chiral plate at one wavelength and azimuth.
struct ChiralSample {
  double left = 1.0;
  double right = 1.0;
  double phase = 0.0;
};

using MuellerMatrix = Eigen::Matrix4d;

/// Closed-form Müller matrix of the diagonal circular-basis Jones matrix
/// diag(√aL, √aR e^{jΔφ}): the upper-left block is ½[[aL+aR, aL−aR], [aL−aR, aL+aR]],
/// the lower-right block √(aL aR) times a rotation by Δφ.
MuellerMatrix mueller_from_jones(const ChiralSample& s);

/// First Stokes component after an unpolarized unit-intensity input, (aL + aR) / 2.
double unpolarized_transmittance(const ChiralSample& s);

/// One plasmonic resonance of a cell. Depths scale a unit-peak Lorentzian of
/// the given FWHM; the azimuth factor is 0.5 + 0.5·sensitivity·cos(2(φ − phase)).
struct Resonance {
  double center_nm = 600.0;
  double width_nm = 60.0;
  double depth_left = 0.0;
  double depth_right = 0.0;
  double azimuth_phase_deg = 0.0;
  double azimuth_sensitivity = 0.0;
};

struct GnpCell {
  std::string id;
  std::vector<Resonance> resonances;
};

double lorentzian(double lambda_nm, double center_nm, double width_nm);

double azimuth_factor(const Resonance& r, double azimuth_deg);

/// Synthetic chiroptical response of a cell. Throws std::invalid_argument for
/// an azimuth outside [−90°, 90°].
ChiralSample cell_response(const GnpCell& cell, double lambda_nm, double azimuth_deg);

/// Unpolarized transmittance spectrum ā(λ) of a cell at a fixed azimuth.
SpectralFunction cell_transmittance(const GnpCell& cell, const SpectralGrid& grid, double azimuth_deg);

/// g_c = ∫ R_PD(λ) S_c(λ) ā(λ) dλ for c = red, green, blue.
Eigen::Vector3d gnp_gain_vector(const GnpCell& cell, const SpdSet& spds, const SpectralFunction& responsivity,
                                double azimuth_deg);

/// Cells of one plate and the cell each LED shines through.
struct GnpPlate {
  std::vector<GnpCell> cells;
  std::vector<std::size_t> led_to_cell;

  std::size_t led_count() const { return led_to_cell.size(); }
  const GnpCell& cell_for_led(std::size_t m) const;

  /// Throws std::invalid_argument unless every LED maps to an existing cell
  /// and the plate has at least `users` cells.
  void validate(std::size_t users) const;

  /// A plate of `led_count` transparent cells (ā ≡ 1), one per LED.
  static GnpPlate transparent(std::size_t led_count);
};

/// Block-diagonal N_t × 3N_t matrix with gᵀ_m in row m, columns 3m..3m+2.
Eigen::MatrixXd block_gain(std::span<const Eigen::Vector3d> per_led);

/// Gain matrix G for one (receiver, headlight) pair from the azimuth each LED
/// sees the receiver under.
Eigen::MatrixXd gain_matrix(const GnpPlate& plate, const SpdSet& spds, const SpectralFunction& responsivity,
                            std::span<const double> azimuth_per_led_deg);

}  // namespace vvlc
