#pragma once

#include <string>

#include <Eigen/Dense>

namespace vvlc {

/// minimize ½ xᵀHx + cᵀx  subject to  A x <= b,  E x = e,  and x >= 0 when
/// `nonnegative` is set.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::MatrixXd a_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  bool nonnegative = true;

  Eigen::Index size() const { return linear.size(); }
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(hessian * x) + linear.dot(x); }
  /// Largest violation of any constraint at x (zero when feasible).
  double violation(const Eigen::VectorXd& x) const;
};

enum class QpStatus { optimal, max_iterations, infeasible };

std::string to_string(QpStatus s);

struct QpOptions {
  int max_iterations = 500;
  /// Feasibility and activity tolerance on unit-norm constraint rows.
  double feasibility_tol = 1e-10;
  /// Dual tolerance on the scaled problem.
  double optimality_tol = 1e-10;
  /// Relative eigenvalue floor below which the Hessian counts as indefinite.
  double psd_tol = 1e-10;
};

struct QpResult {
  Eigen::VectorXd x;
  QpStatus status = QpStatus::infeasible;
  /// Multipliers in the order: inequality rows, bounds (if any), equality rows.
  Eigen::VectorXd multipliers;
  int iterations = 0;
  double objective = 0.0;
  /// Phase-one constraint violation when status is infeasible.
  double infeasibility = 0.0;
};

/// Primal active-set method on the null space of the working constraints.
/// Starts from `start` when it is feasible, otherwise runs a phase-one
/// problem first. Throws std::invalid_argument for inconsistent dimensions or
/// a Hessian with eigenvalues below −psd_tol·‖H‖.
QpResult solve_qp(const QpProblem& problem, const Eigen::VectorXd& start, const QpOptions& options = {});
QpResult solve_qp(const QpProblem& problem, const QpOptions& options = {});

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double complementarity = 0.0;
  double dual = 0.0;
};

/// Residuals of the KKT system at (x, multipliers), each relative to the
/// magnitude of the objective gradient terms.
KktResiduals kkt_residuals(const QpProblem& problem, const QpResult& result);

}  // namespace vvlc
