#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vvlc/colorimetry.hpp"
#include "vvlc/rgb_optimizer.hpp"

namespace vvlc {

/// Precoders of every served receiver, indexed [headlight][served index].
using PrecoderSet = std::vector<std::vector<Eigen::VectorXd>>;

/// Solves the SLNR precoder of every served receiver of one headlight at
/// fixed ratios p. The shot-noise constant is recomputed from p.
std::vector<Eigen::VectorXd> design_precoders(const HeadlightProblem& problem, const Eigen::VectorXd& p);

/// Maximum-ratio precoders at fixed p.
std::vector<Eigen::VectorXd> mrt_precoders(const HeadlightProblem& problem, const Eigen::VectorXd& p);

struct AoOptions {
  /// Relative tolerance of the outer stopping test.
  double epsilon = 1e-4;
  int max_outer_iterations = 50;
  ScaOptions sca;
};

struct AoTraceRow {
  double kelvin = 0.0;
  int outer = 0;
  double sum_slnr = 0.0;
  /// Sum SLNR with the new precoders, before the ratio update.
  double before_sca = 0.0;
  int inner_iterations = 0;
};

struct AoResult {
  double kelvin = 0.0;
  bool feasible = false;
  std::string diagnostic;
  PrecoderSet precoders;
  std::vector<Eigen::VectorXd> ratios;
  std::vector<StrictWhiteResult> initial;
  double sum_slnr = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  std::vector<AoTraceRow> trace;
};

/// Alternates precoder and ratio updates for one color temperature, starting
/// from the strict-white mix for the Planckian point of K. An infeasible K is
/// reported through `feasible` and `diagnostic` instead of an exception.
AoResult ao_for_temperature(std::span<const HeadlightProblem> headlights, const QuadrangleConstraint& quadrangle,
                            const AoOptions& options = {});

struct AoSelection {
  AoResult best;
  std::vector<AoResult> per_temperature;
};

/// Runs every K and keeps the largest sum SLNR; ties go to the larger K.
/// Throws std::runtime_error when no K is feasible.
AoSelection ao_over_temperatures(std::span<const HeadlightProblem> headlights, const QuadrangleTable& table,
                                 std::span<const double> temperatures, const AoOptions& options = {});

}  // namespace vvlc
