#include "vvlc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vvlc {

namespace {

constexpr double kRateFactor = std::numbers::e / (2.0 * std::numbers::pi);

double half_log_rate(double sinr) { return 0.5 * std::log2(1.0 + kRateFactor * sinr); }

}  // namespace

RateReport sum_rate(const Evaluation& eval) {
  const double a2p2 = eval.alpha * eval.alpha * eval.ptx_w * eval.ptx_w;
  RateReport out;
  for (std::size_t k = 0; k < eval.served.size(); ++k) {
    const std::size_t u = eval.served[k];
    double signal = 0.0;
    double in = eval.noise.thermal_w;
    for (std::size_t i = 0; i < eval.channels.size(); ++i) {
      const Eigen::MatrixXd& h = eval.channels[i].at(u);
      const auto& f = eval.precoders[i];
      signal += a2p2 * (h * f[k]).squaredNorm();
      for (std::size_t v = 0; v < f.size(); ++v)
        if (v != k) in += a2p2 * (h * f[v]).squaredNorm();
      in += shot_noise_jensen(h, f, eval.noise, eval.alpha, eval.ptx_w);
    }
    out.per_user.push_back(half_log_rate(signal / in));
    out.sum += out.per_user.back();
  }
  return out;
}

double link_rate(std::span<const Eigen::MatrixXd> channels, std::span<const Eigen::VectorXd> precoders,
                 const NoiseModel& noise, double alpha, double ptx_w) {
  if (channels.size() != precoders.size()) throw std::invalid_argument("link_rate: one precoder per headlight");
  const double a2p2 = alpha * alpha * ptx_w * ptx_w;
  double signal = 0.0;
  double noise_sum = noise.thermal_w;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    signal += a2p2 * (channels[i] * precoders[i]).squaredNorm();
    noise_sum += shot_noise_jensen(channels[i], precoders.subspan(i, 1), noise, alpha, ptx_w);
  }
  return half_log_rate(signal / noise_sum);
}

double secrecy_rate(double bob_rate, double eve_rate) { return std::max(bob_rate - eve_rate, 0.0); }

double secrecy_rate(std::span<const Eigen::MatrixXd> bob, std::span<const Eigen::MatrixXd> eve,
                    std::span<const Eigen::VectorXd> precoders, const NoiseModel& noise, double alpha, double ptx_w) {
  return secrecy_rate(link_rate(bob, precoders, noise, alpha, ptx_w), link_rate(eve, precoders, noise, alpha, ptx_w));
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double ber_4pam(double kappa) {
  if (kappa < 0.0) throw std::domain_error("ber_4pam: negative kappa");
  return 0.75 * q_function(kappa) + q_function(2.0 * kappa) + 0.25 * q_function(3.0 * kappa);
}

double ber_4pam_exact(double kappa) {
  if (kappa < 0.0) throw std::domain_error("ber_4pam_exact: negative kappa");
  return 0.25 * (3.0 * q_function(kappa) + 2.0 * q_function(3.0 * kappa) - q_function(5.0 * kappa));
}

double kappa_for_ber(double ber) {
  if (!(ber > 0.0 && ber < 1.0)) throw std::domain_error("kappa_for_ber: target must lie in (0, 1)");
  double lo = 0.0, hi = 1.0;
  while (ber_4pam(hi) > ber) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ber_4pam(mid) > ber ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double kappa_norm_term(const Eigen::MatrixXd& gain, const Eigen::VectorXd& p, const Eigen::VectorXd& f,
                       std::size_t nr) {
  const Eigen::VectorXd w = gain * p;
  if (w.size() != f.size()) throw std::invalid_argument("kappa_norm_term: dimension mismatch");
  return std::sqrt(static_cast<double>(nr)) * std::abs(w.dot(f));
}

double kappa(double mean_los, double ptx_w, double sigma2, double norm_term, double d) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("kappa: noise level must be positive");
  return mean_los * ptx_w * d / (2.0 * sigma2) * norm_term;
}

double LosGeometry::numerator() const {
  return (order + 1.0) * area_m2 / (2.0 * std::numbers::pi) * std::pow(cos_emit, order) * cos_incidence;
}

double comm_distance(double target_kappa, const LosGeometry& geometry, double ptx_w, double sigma2, double norm_term,
                     double d) {
  if (!(target_kappa > 0.0) || !(sigma2 > 0.0)) throw std::invalid_argument("comm_distance: κ and σ₂ must be positive");
  return std::sqrt(geometry.numerator() * ptx_w * d / (2.0 * sigma2 * target_kappa) * norm_term);
}

}  // namespace vvlc
