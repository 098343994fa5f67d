#include "vvlc/gnp_optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vvlc {

MuellerMatrix mueller_from_jones(const ChiralSample& s) {
  const double mean = 0.5 * (s.left + s.right);
  const double diff = 0.5 * (s.left - s.right);
  const double g = std::sqrt(s.left * s.right);
  const double c = std::cos(s.phase), sn = std::sin(s.phase);
  MuellerMatrix m = MuellerMatrix::Zero();
  m(0, 0) = mean;
  m(0, 1) = diff;
  m(1, 0) = diff;
  m(1, 1) = mean;
  m(2, 2) = g * c;
  m(2, 3) = -g * sn;
  m(3, 2) = g * sn;
  m(3, 3) = g * c;
  return m;
}

double unpolarized_transmittance(const ChiralSample& s) { return 0.5 * (s.left + s.right); }

double lorentzian(double lambda_nm, double center_nm, double width_nm) {
  const double x = 2.0 * (lambda_nm - center_nm) / width_nm;
  return 1.0 / (1.0 + x * x);
}

double azimuth_factor(const Resonance& r, double azimuth_deg) {
  const double arg = 2.0 * (azimuth_deg - r.azimuth_phase_deg) * std::numbers::pi / 180.0;
  return 0.5 + 0.5 * r.azimuth_sensitivity * std::cos(arg);
}

ChiralSample cell_response(const GnpCell& cell, double lambda_nm, double azimuth_deg) {
  if (!(azimuth_deg >= -90.0 && azimuth_deg <= 90.0))
    throw std::invalid_argument("cell_response: azimuth outside [-90, 90] degrees");
  double loss_left = 0.0, loss_right = 0.0, phase = 0.0;
  for (const Resonance& r : cell.resonances) {
    const double shape = lorentzian(lambda_nm, r.center_nm, r.width_nm);
    const double az = azimuth_factor(r, azimuth_deg);
    loss_left += r.depth_left * shape * az;
    loss_right += r.depth_right * shape * az;
    // Dispersive companion of the absorption line; carried for completeness.
    const double x = 2.0 * (lambda_nm - r.center_nm) / r.width_nm;
    phase += 0.5 * std::numbers::pi * (r.depth_left - r.depth_right) * x * shape * az;
  }
  return {std::clamp(1.0 - loss_left, 0.0, 1.0), std::clamp(1.0 - loss_right, 0.0, 1.0), phase};
}

SpectralFunction cell_transmittance(const GnpCell& cell, const SpectralGrid& grid, double azimuth_deg) {
  return SpectralFunction::sample(
      grid, [&](double l) { return unpolarized_transmittance(cell_response(cell, l, azimuth_deg)); });
}

Eigen::Vector3d gnp_gain_vector(const GnpCell& cell, const SpdSet& spds, const SpectralFunction& responsivity,
                                double azimuth_deg) {
  const SpectralFunction weight = responsivity * cell_transmittance(cell, responsivity.grid(), azimuth_deg);
  Eigen::Vector3d g;
  for (std::size_t c = 0; c < 3; ++c) g[static_cast<Eigen::Index>(c)] = integrate(weight * spds[c]);
  return g;
}

const GnpCell& GnpPlate::cell_for_led(std::size_t m) const {
  if (m >= led_to_cell.size()) throw std::invalid_argument("GNP plate: LED has no cell mapping");
  const std::size_t c = led_to_cell[m];
  if (c >= cells.size()) throw std::invalid_argument("GNP plate: LED mapped to a missing cell");
  return cells[c];
}

void GnpPlate::validate(std::size_t users) const {
  if (cells.size() < users) throw std::invalid_argument("GNP plate: fewer cells than served users");
  for (std::size_t m = 0; m < led_to_cell.size(); ++m) (void)cell_for_led(m);
}

GnpPlate GnpPlate::transparent(std::size_t led_count) {
  GnpPlate plate;
  for (std::size_t m = 0; m < led_count; ++m) {
    plate.cells.push_back({"clear-" + std::to_string(m), {}});
    plate.led_to_cell.push_back(m);
  }
  return plate;
}

Eigen::MatrixXd block_gain(std::span<const Eigen::Vector3d> per_led) {
  const auto n = static_cast<Eigen::Index>(per_led.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, 3 * n);
  for (Eigen::Index m = 0; m < n; ++m) g.block(m, 3 * m, 1, 3) = per_led[static_cast<std::size_t>(m)].transpose();
  return g;
}

Eigen::MatrixXd gain_matrix(const GnpPlate& plate, const SpdSet& spds, const SpectralFunction& responsivity,
                            std::span<const double> azimuth_per_led_deg) {
  if (azimuth_per_led_deg.size() != plate.led_count())
    throw std::invalid_argument("gain_matrix: one azimuth per LED required");
  std::vector<Eigen::Vector3d> g;
  g.reserve(plate.led_count());
  for (std::size_t m = 0; m < plate.led_count(); ++m)
    g.push_back(gnp_gain_vector(plate.cell_for_led(m), spds, responsivity, azimuth_per_led_deg[m]));
  return block_gain(g);
}

}  // namespace vvlc
