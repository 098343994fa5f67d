#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vvlc/colorimetry.hpp"
#include "vvlc/precoder.hpp"
#include "vvlc/qp.hpp"

namespace vvlc {

/// One receiver as seen through one headlight.
struct LinkData {
  Eigen::MatrixXd path_loss;  // N_r × N_t
  Eigen::MatrixXd gain;       // N_t × 3N_t
  ColorMap color;

  /// H̄ = H G, so that H̃ f = H̄ F p.
  Eigen::MatrixXd hbar() const { return path_loss * gain; }
  Eigen::MatrixXd effective(const Eigen::VectorXd& p) const;
};

/// Everything the precoder and ratio updates of one headlight need. Every
/// receiver in `links` is protected from leakage; only `served` ones get a
/// precoder.
struct HeadlightProblem {
  std::vector<LinkData> links;
  std::vector<std::size_t> served;
  double alpha = 0.5;
  double ptx_w = 1.0;
  NoiseModel noise;

  std::size_t led_count() const { return static_cast<std::size_t>(links.front().path_loss.cols()); }
  /// Throws std::invalid_argument on empty or inconsistent data.
  void validate() const;
};

/// Ĩ: N_t × 3N_t, row m sums the three ratios of LED m.
Eigen::MatrixXd led_sum_matrix(std::size_t nt);

/// F = diag(f ⊗ 1₃).
Eigen::MatrixXd precoder_expansion(const Eigen::VectorXd& f);

struct StrictWhiteResult {
  Eigen::VectorXd p;
  /// ‖Ĩp − 1‖ at the returned point, before any rescaling.
  double residual = 0.0;
  /// True when a nonzero p meets the target chromaticity at every receiver.
  bool feasible = false;
  QpStatus status = QpStatus::infeasible;
};

/// Mix with per-LED sums as close to one as possible while every receiver
/// sees exactly `target`. When the sums cannot all reach one, p is scaled so
/// that the largest LED sum is one.
StrictWhiteResult init_ratios_strict(std::span<const ColorMap> receivers, const Chromaticity& target,
                                     const QpOptions& options = {});

/// Signal, leakage and shot-noise terms of one served receiver.
struct SlnrTerms {
  double signal = 0.0;
  double leakage = 0.0;
  double shot = 0.0;

  double ratio(double thermal_w) const { return signal / (leakage + shot + thermal_w); }
};

std::vector<SlnrTerms> slnr_terms_of_p(const HeadlightProblem& problem, std::span<const Eigen::VectorXd> precoders,
                                       const Eigen::VectorXd& p);

/// Σ_u μ_S / (μ_L + μ_u + σ_th²).
double sum_slnr(std::span<const SlnrTerms> terms, double thermal_w);

double sum_slnr(const HeadlightProblem& problem, std::span<const Eigen::VectorXd> precoders,
                const Eigen::VectorXd& p);

/// 2ν√μ_S − ν²(μ_L + μ_u + σ_th²).
double quadratic_transform(double signal, double leakage, double shot, double thermal_w, double nu);

/// √μ_S / (μ_L + μ_u + σ_th²).
double optimal_nu(double signal, double leakage, double shot, double thermal_w);

/// Quadratic forms in p: μ_S = α²P² pᵀA p, μ_L = α²P² pᵀM p, μ_u = γP √(pᵀB p).
struct RatioForms {
  Eigen::MatrixXd signal;   // A_u
  Eigen::MatrixXd leakage;  // M_u
  Eigen::MatrixXd shot;     // B_u
};

RatioForms ratio_forms(const HeadlightProblem& problem, std::span<const Eigen::VectorXd> precoders,
                       std::size_t served_index);

/// value + gradientᵀ (p − anchor).
struct Affine {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::VectorXd anchor;

  double operator()(const Eigen::VectorXd& p) const { return value + gradient.dot(p - anchor); }
};

struct Linearization {
  Affine sqrt_signal;
  Affine shot;
};

/// First-order expansions of √μ_S and μ_u at p. Throws std::domain_error when
/// either value is zero there.
Linearization linearize(const RatioForms& forms, const Eigen::VectorXd& p, double alpha, double ptx_w, double gamma);

struct ScaOptions {
  double epsilon = 1e-4;
  int max_iterations = 100;
  /// Recompute ν at every local point; otherwise keep the values of the start.
  bool refresh_nu_each_iteration = true;
  QpOptions qp;
};

struct ScaResult {
  Eigen::VectorXd p;
  /// Exact sum SLNR at the start and after every iteration; equals the
  /// surrogate evaluated with ν refreshed at that point.
  std::vector<double> objective_trace;
  /// Optimal value of each convex subproblem.
  std::vector<double> model_trace;
  int iterations = 0;
  bool converged = false;
};

/// Feasible set of the ratio update: Ĩp ≤ 1, every receiver's mix inside the
/// quadrangle, p ≥ 0.
QpProblem ratio_feasible_set(const HeadlightProblem& problem, const QuadrangleConstraint& quadrangle);

/// Successive convex approximation of the sum-SLNR ratio problem with fixed
/// precoders. Every step is backtracked along the segment toward the
/// subproblem optimum so that the exact sum SLNR never decreases. Throws
/// std::invalid_argument when `start` is infeasible.
ScaResult sca_loop(const HeadlightProblem& problem, std::span<const Eigen::VectorXd> precoders,
                   const QuadrangleConstraint& quadrangle, const Eigen::VectorXd& start,
                   const ScaOptions& options = {});

}  // namespace vvlc
