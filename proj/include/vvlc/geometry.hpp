#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace vvlc {

/// Static road scene. LEDs face +y (driving direction), photodiodes face −y
/// (back toward the transmitter), the reflector is a horizontal patch facing +z.
struct Scene {
  std::vector<Eigen::Vector3d> headlights = {{-1.0, 0.0, 1.1}, {1.0, 0.0, 1.1}};
  std::size_t leds_per_headlight = 4;
  double led_spacing_m = 0.04;
  std::vector<Eigen::Vector3d> receivers = {{-3.0, 20.0, 0.9}, {0.0, 23.0, 0.9}, {3.0, 19.0, 0.9}};
  std::size_t pds_per_receiver = 4;
  double pd_spacing_m = 0.01;
  double reflector_height_m = 0.0;
  /// Optional fixed reflector centre per receiver; otherwise the road point
  /// midway between headlight and receiver is used.
  std::vector<std::optional<Eigen::Vector3d>> reflector_overrides;

  std::size_t headlight_count() const { return headlights.size(); }
  std::size_t receiver_count() const { return receivers.size(); }

  std::vector<Eigen::Vector3d> led_positions(std::size_t headlight) const;
  std::vector<Eigen::Vector3d> pd_positions(std::size_t receiver) const;
  Eigen::Vector3d reflector_centre(std::size_t receiver, std::size_t headlight) const;

  /// Throws std::invalid_argument on negative heights, empty arrays or
  /// coincident receivers.
  void validate() const;
};

/// Offsets of `count` elements on a centred square grid in the x-z plane.
std::vector<Eigen::Vector3d> square_layout(std::size_t count, double spacing_m);

struct Radiometry {
  double half_power_deg = 20.0;
  double pd_area_m2 = 1e-4;
  double reflector_area_m2 = 0.04;
  double efficiency_w_per_a = 0.44;
  double modulation_index = 0.5;

  double lambertian_order() const;
  void validate() const;
};

/// −ln 2 / ln cos Φ½. Throws std::domain_error unless 0 < Φ½ < 90°.
double lambertian_order(double half_power_deg);

/// A point with the unit normal it emits along or receives from.
struct Aperture {
  Eigen::Vector3d position;
  Eigen::Vector3d normal;
};

/// (n+1) A / (2π R²) cosⁿφ cosθ; zero when either cosine is negative. Throws
/// std::invalid_argument for coincident points.
double los_gain(const Aperture& led, const Aperture& pd, double order, double pd_area_m2);

/// Single-bounce gain LED → reflector → PD with mean reflectance ρ̄.
double nlos_gain(const Aperture& led, const Aperture& reflector, const Aperture& pd, const Radiometry& radiometry,
                 double mean_reflectance);

/// N_r × N_t path-loss matrix of one (receiver, headlight) link, split by path.
struct PathLoss {
  Eigen::MatrixXd los;
  Eigen::MatrixXd nlos;

  Eigen::MatrixXd combined(bool include_nlos) const { return include_nlos ? Eigen::MatrixXd(los + nlos) : los; }
};

PathLoss path_loss_matrix(const Scene& scene, const Radiometry& radiometry, std::size_t receiver,
                          std::size_t headlight, double mean_reflectance);

/// Signed horizontal angle in degrees from +y to the ray from `from` to `to`;
/// positive toward +x. Throws std::invalid_argument when `to` is not ahead.
double azimuth_deg(const Eigen::Vector3d& from, const Eigen::Vector3d& to);

/// Azimuth of the receiver's array centre seen from the headlight centre.
double azimuth_of(const Scene& scene, std::size_t receiver, std::size_t headlight);

/// Azimuth of the receiver's array centre seen from each LED of the headlight.
std::vector<double> led_azimuths(const Scene& scene, std::size_t receiver, std::size_t headlight);

/// H · diag(G p).
Eigen::MatrixXd effective_channel(const Eigen::MatrixXd& path_loss, const Eigen::MatrixXd& gain,
                                  const Eigen::VectorXd& ratios);

/// Flips v so that its first component with magnitude above 1e-12‖v‖ is positive.
void normalize_sign(Eigen::VectorXd& v);

/// Dominant eigenpair of H̃ᵀH̃.
struct RankOneApprox {
  double eigenvalue = 0.0;
  Eigen::VectorXd direction;
};

RankOneApprox rank1_approx(const Eigen::MatrixXd& channel);

/// σ_max / σ_min (infinity for a singular matrix).
double condition_number(const Eigen::MatrixXd& m);

}  // namespace vvlc
