#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "vvlc/colorimetry.hpp"

namespace vvlc {

/// 10^((dBm - 30) / 10).
double dbm_to_watts(double dbm);

struct NoiseModel {
  double thermal_w = dbm_to_watts(-128.76);
  double electron_charge = si::kElectronCharge;
  double bandwidth_hz = 1e8;

  /// Shot-noise scale γ = 2 q B.
  double gamma() const { return 2.0 * electron_charge * bandwidth_hz; }
  void validate() const;
};

/// γ P √(‖H̃1‖² + α² Σ_v ‖H̃ f_v‖²).
double shot_noise_jensen(const Eigen::MatrixXd& channel, std::span<const Eigen::VectorXd> precoders,
                         const NoiseModel& noise, double alpha, double ptx_w);

/// γ P (√N_t + αU) √λ̃. Does not depend on the precoders.
double shot_noise_constant(double top_eigenvalue, std::size_t nt, std::size_t users, double alpha, double gamma,
                           double ptx_w);

/// α² P² Σ_v H̃_vᵀ H̃_v over the leaked-to channels.
Eigen::MatrixXd leakage_matrix(std::span<const Eigen::MatrixXd> leaked, double alpha, double ptx_w);

struct SlnrSolution {
  Eigen::VectorXd f;
  /// Largest eigenvalue μ of the pencil (H̃ᵀH̃, L + σ²I).
  double eigenvalue = 0.0;
  /// α² P² μ, the attained signal-to-leakage-and-noise ratio.
  double slnr = 0.0;
};

/// α² P² fᵀH̃ᵀH̃f / fᵀ(L + σ²I)f for a unit-norm f.
double slnr_objective(const Eigen::MatrixXd& channel, const Eigen::MatrixXd& leakage, double regularizer,
                      double alpha, double ptx_w, const Eigen::VectorXd& f);

/// Maximizes the signal-to-leakage-and-noise ratio over unit-norm precoders.
/// `leakage` is L_u, `regularizer` is σ̌² + σ_th² and must be positive.
/// Throws std::invalid_argument on non-finite input or a mismatched size.
SlnrSolution solve_slnr(const Eigen::MatrixXd& channel, const Eigen::MatrixXd& leakage, double regularizer,
                        double alpha, double ptx_w);

/// Dominant right singular vector of H̃. Throws std::invalid_argument for a zero channel.
Eigen::VectorXd mrt_precoder(const Eigen::MatrixXd& channel);

}  // namespace vvlc
