#include "vvlc/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vvlc {

namespace {

const Eigen::Vector3d kForward(0.0, 1.0, 0.0);
const Eigen::Vector3d kBackward(0.0, -1.0, 0.0);
const Eigen::Vector3d kUp(0.0, 0.0, 1.0);

}  // namespace

std::vector<Eigen::Vector3d> square_layout(std::size_t count, double spacing_m) {
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  const std::size_t rows = cols == 0 ? 0 : (count + cols - 1) / cols;
  std::vector<Eigen::Vector3d> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double c = static_cast<double>(k % cols) - 0.5 * static_cast<double>(cols - 1);
    const double r = 0.5 * static_cast<double>(rows - 1) - static_cast<double>(k / cols);
    out.emplace_back(c * spacing_m, 0.0, r * spacing_m);
  }
  return out;
}

std::vector<Eigen::Vector3d> Scene::led_positions(std::size_t headlight) const {
  auto pts = square_layout(leds_per_headlight, led_spacing_m);
  for (auto& p : pts) p += headlights.at(headlight);
  return pts;
}

std::vector<Eigen::Vector3d> Scene::pd_positions(std::size_t receiver) const {
  auto pts = square_layout(pds_per_receiver, pd_spacing_m);
  for (auto& p : pts) p += receivers.at(receiver);
  return pts;
}

Eigen::Vector3d Scene::reflector_centre(std::size_t receiver, std::size_t headlight) const {
  if (receiver < reflector_overrides.size() && reflector_overrides[receiver]) return *reflector_overrides[receiver];
  const Eigen::Vector3d mid = 0.5 * (headlights.at(headlight) + receivers.at(receiver));
  return {mid.x(), mid.y(), reflector_height_m};
}

void Scene::validate() const {
  if (headlights.empty() || receivers.empty()) throw std::invalid_argument("scene: need headlights and receivers");
  if (leds_per_headlight == 0 || pds_per_receiver == 0) throw std::invalid_argument("scene: empty LED or PD array");
  if (!(led_spacing_m >= 0.0) || !(pd_spacing_m >= 0.0)) throw std::invalid_argument("scene: negative spacing");
  for (const auto& h : headlights)
    if (h.z() < 0.0) throw std::invalid_argument("scene: headlight below ground");
  for (std::size_t a = 0; a < receivers.size(); ++a) {
    if (receivers[a].z() < 0.0) throw std::invalid_argument("scene: receiver below ground");
    for (std::size_t b = 0; b < a; ++b)
      if ((receivers[a] - receivers[b]).norm() < 1e-9) throw std::invalid_argument("scene: coincident receivers");
  }
  if (reflector_height_m < 0.0) throw std::invalid_argument("scene: reflector below ground");
}

double lambertian_order(double half_power_deg) {
  if (!(half_power_deg > 0.0 && half_power_deg < 90.0))
    throw std::domain_error("lambertian_order: half-power angle must lie in (0, 90) degrees");
  return -std::numbers::ln2 / std::log(std::cos(half_power_deg * std::numbers::pi / 180.0));
}

double Radiometry::lambertian_order() const { return vvlc::lambertian_order(half_power_deg); }

void Radiometry::validate() const {
  (void)lambertian_order();
  if (!(pd_area_m2 > 0.0) || !(reflector_area_m2 >= 0.0)) throw std::invalid_argument("radiometry: bad areas");
  if (!(modulation_index >= 0.0 && modulation_index <= 1.0))
    throw std::invalid_argument("radiometry: modulation index outside [0, 1]");
  if (!(efficiency_w_per_a > 0.0)) throw std::invalid_argument("radiometry: efficiency must be positive");
}

double los_gain(const Aperture& led, const Aperture& pd, double order, double pd_area_m2) {
  const Eigen::Vector3d d = pd.position - led.position;
  const double r = d.norm();
  if (!(r > 0.0)) throw std::invalid_argument("los_gain: zero link distance");
  const double cos_emit = led.normal.dot(d) / r;
  const double cos_inc = -pd.normal.dot(d) / r;
  if (cos_emit <= 0.0 || cos_inc <= 0.0) return 0.0;
  return (order + 1.0) * pd_area_m2 / (2.0 * std::numbers::pi * r * r) * std::pow(cos_emit, order) * cos_inc;
}

double nlos_gain(const Aperture& led, const Aperture& reflector, const Aperture& pd, const Radiometry& radiometry,
                 double mean_reflectance) {
  const double order = radiometry.lambertian_order();
  const Eigen::Vector3d d1 = reflector.position - led.position;
  const Eigen::Vector3d d2 = pd.position - reflector.position;
  const double r1 = d1.norm(), r2 = d2.norm();
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw std::invalid_argument("nlos_gain: degenerate reflector geometry");
  const double cos_emit = led.normal.dot(d1) / r1;
  const double cos_hit = -reflector.normal.dot(d1) / r1;
  const double cos_bounce = reflector.normal.dot(d2) / r2;
  const double cos_inc = -pd.normal.dot(d2) / r2;
  if (cos_emit <= 0.0 || cos_hit <= 0.0 || cos_bounce <= 0.0 || cos_inc <= 0.0) return 0.0;
  const double first = (order + 1.0) * radiometry.reflector_area_m2 * std::pow(cos_emit, order) * cos_hit /
                       (2.0 * std::numbers::pi * r1 * r1);
  const double second = radiometry.pd_area_m2 * cos_bounce * cos_inc / (std::numbers::pi * r2 * r2) * mean_reflectance;
  return first * second;
}

PathLoss path_loss_matrix(const Scene& scene, const Radiometry& radiometry, std::size_t receiver,
                          std::size_t headlight, double mean_reflectance) {
  const auto leds = scene.led_positions(headlight);
  const auto pds = scene.pd_positions(receiver);
  const double order = radiometry.lambertian_order();
  const Aperture reflector{scene.reflector_centre(receiver, headlight), kUp};
  PathLoss out{Eigen::MatrixXd(pds.size(), leds.size()), Eigen::MatrixXd(pds.size(), leds.size())};
  for (std::size_t n = 0; n < pds.size(); ++n) {
    const Aperture pd{pds[n], kBackward};
    for (std::size_t m = 0; m < leds.size(); ++m) {
      const Aperture led{leds[m], kForward};
      const auto r = static_cast<Eigen::Index>(n), c = static_cast<Eigen::Index>(m);
      out.los(r, c) = los_gain(led, pd, order, radiometry.pd_area_m2);
      out.nlos(r, c) = nlos_gain(led, reflector, pd, radiometry, mean_reflectance);
    }
  }
  return out;
}

double azimuth_deg(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const double dx = to.x() - from.x(), dy = to.y() - from.y();
  if (!(dy > 0.0)) throw std::invalid_argument("azimuth: receiver is not ahead of the transmitter");
  return std::atan2(dx, dy) * 180.0 / std::numbers::pi;
}

double azimuth_of(const Scene& scene, std::size_t receiver, std::size_t headlight) {
  return azimuth_deg(scene.headlights.at(headlight), scene.receivers.at(receiver));
}

std::vector<double> led_azimuths(const Scene& scene, std::size_t receiver, std::size_t headlight) {
  std::vector<double> out;
  for (const auto& led : scene.led_positions(headlight)) out.push_back(azimuth_deg(led, scene.receivers.at(receiver)));
  return out;
}

Eigen::MatrixXd effective_channel(const Eigen::MatrixXd& path_loss, const Eigen::MatrixXd& gain,
                                  const Eigen::VectorXd& ratios) {
  if (gain.cols() != ratios.size() || path_loss.cols() != gain.rows())
    throw std::invalid_argument("effective_channel: dimension mismatch");
  return path_loss * (gain * ratios).asDiagonal();
}

void normalize_sign(Eigen::VectorXd& v) {
  const double scale = v.norm();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) > 1e-12 * scale) {
      if (v[k] < 0.0) v = -v;
      return;
    }
  }
}

RankOneApprox rank1_approx(const Eigen::MatrixXd& channel) {
  if (channel.size() == 0 || channel.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("rank1_approx: zero channel");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(channel.transpose() * channel);
  const Eigen::Index top = eig.eigenvalues().size() - 1;
  RankOneApprox out{std::max(0.0, eig.eigenvalues()[top]), eig.eigenvectors().col(top)};
  out.direction.normalize();
  normalize_sign(out.direction);
  return out;
}

double condition_number(const Eigen::MatrixXd& m) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s[s.size() - 1];
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / lo;
}

}  // namespace vvlc
