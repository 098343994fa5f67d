#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vvlc/precoder.hpp"

namespace vvlc {

/// Effective channels [headlight][receiver] with the precoders of the served
/// receivers [headlight][served index].
struct Evaluation {
  std::vector<std::vector<Eigen::MatrixXd>> channels;
  std::vector<std::vector<Eigen::VectorXd>> precoders;
  std::vector<std::size_t> served;
  double alpha = 0.5;
  double ptx_w = 1.0;
  NoiseModel noise;
};

struct RateReport {
  std::vector<double> per_user;
  double sum = 0.0;
};

/// ½ Σ_u log₂(1 + (e/2π) S_u / μ_IN,u) with the Jensen shot-noise bound.
RateReport sum_rate(const Evaluation& eval);

/// Achievable rate of one receiver that sees only the transmitted precoders
/// (no interference term): the per-channel rate used for Bob and Eve.
double link_rate(std::span<const Eigen::MatrixXd> channels, std::span<const Eigen::VectorXd> precoders,
                 const NoiseModel& noise, double alpha, double ptx_w);

/// max(R_B − R_E, 0).
double secrecy_rate(double bob_rate, double eve_rate);

double secrecy_rate(std::span<const Eigen::MatrixXd> bob, std::span<const Eigen::MatrixXd> eve,
                    std::span<const Eigen::VectorXd> precoders, const NoiseModel& noise, double alpha, double ptx_w);

/// Gaussian tail probability.
double q_function(double x);

/// ¾Q(κ) + Q(2κ) + ¼Q(3κ).
double ber_4pam(double kappa);

/// Exact bit error rate of Gray-coded 4-PAM at the same κ: ¼(3Q(κ) + 2Q(3κ) − Q(5κ)).
double ber_4pam_exact(double kappa);

/// κ for which ber_4pam equals `ber`, by bisection. Throws std::domain_error
/// unless 0 < ber < 1.
double kappa_for_ber(double ber);

/// Adjacent symbol distance of unit-power 4-PAM, 2/√5.
inline constexpr double kD4Pam = 0.89442719099991586;

/// ‖1_{N_r×N_t} diag(G p) f‖.
double kappa_norm_term(const Eigen::MatrixXd& gain, const Eigen::VectorXd& p, const Eigen::VectorXd& f,
                       std::size_t nr);

/// (h_L P d / 2σ₂) · norm_term.
double kappa(double mean_los, double ptx_w, double sigma2, double norm_term, double d = kD4Pam);

/// Geometry part of the LOS gain without the distance: (n+1) A cosⁿφ cosθ / 2π.
struct LosGeometry {
  double order = 1.0;
  double area_m2 = 1e-4;
  double cos_emit = 1.0;
  double cos_incidence = 1.0;

  double numerator() const;
};

/// Distance at which the rank-one link reaches κ:
/// √( geometry · P d / (2σ₂κ) · norm_term ).
double comm_distance(double target_kappa, const LosGeometry& geometry, double ptx_w, double sigma2, double norm_term,
                     double d = kD4Pam);

}  // namespace vvlc
