#include "vvlc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vvlc {

std::string to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::max_iterations: return "max_iterations";
    case QpStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

// G x <= h and E x = e with unit-norm rows; `origin` maps each row back to the
// caller's constraint index and `norm` holds the divided-out row length.
struct Normalized {
  Eigen::MatrixXd g;
  Eigen::VectorXd h;
  std::vector<Eigen::Index> g_origin;
  std::vector<double> g_norm;
  Eigen::MatrixXd e;
  Eigen::VectorXd e_rhs;
  std::vector<Eigen::Index> e_origin;
  std::vector<double> e_norm;
  bool trivially_infeasible = false;
};

Normalized normalize_constraints(const QpProblem& p, double tol) {
  const Eigen::Index n = p.size();
  const Eigen::Index m_in = p.a_ineq.rows();
  const Eigen::Index m_b = p.nonnegative ? n : 0;
  Normalized out;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  auto push_ineq = [&](const Eigen::VectorXd& a, double b, Eigen::Index origin) {
    const double len = a.norm();
    if (len == 0.0) {
      if (b < -tol) out.trivially_infeasible = true;
      return;
    }
    rows.push_back(a / len);
    rhs.push_back(b / len);
    out.g_origin.push_back(origin);
    out.g_norm.push_back(len);
  };
  for (Eigen::Index i = 0; i < m_in; ++i) push_ineq(p.a_ineq.row(i).transpose(), p.b_ineq[i], i);
  for (Eigen::Index j = 0; j < m_b; ++j) push_ineq(-Eigen::VectorXd::Unit(n, j), 0.0, m_in + j);
  out.g.resize(static_cast<Eigen::Index>(rows.size()), n);
  out.h.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.g.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    out.h[static_cast<Eigen::Index>(k)] = rhs[k];
  }

  rows.clear();
  rhs.clear();
  for (Eigen::Index i = 0; i < p.a_eq.rows(); ++i) {
    const Eigen::VectorXd a = p.a_eq.row(i).transpose();
    const double len = a.norm();
    if (len == 0.0) {
      if (std::abs(p.b_eq[i]) > tol) out.trivially_infeasible = true;
      continue;
    }
    rows.push_back(a / len);
    rhs.push_back(p.b_eq[i] / len);
    out.e_origin.push_back(m_in + m_b + i);
    out.e_norm.push_back(len);
  }
  out.e.resize(static_cast<Eigen::Index>(rows.size()), n);
  out.e_rhs.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.e.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    out.e_rhs[static_cast<Eigen::Index>(k)] = rhs[k];
  }
  return out;
}

struct ActiveSetResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda_g;
  Eigen::VectorXd lambda_e;
  std::vector<Eigen::Index> working;
  QpStatus status = QpStatus::max_iterations;
  int iterations = 0;
};

Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& e, const Eigen::MatrixXd& g, const std::vector<Eigen::Index>& w) {
  Eigen::MatrixXd m(e.rows() + static_cast<Eigen::Index>(w.size()), e.cols());
  m.topRows(e.rows()) = e;
  for (std::size_t k = 0; k < w.size(); ++k) m.row(e.rows() + static_cast<Eigen::Index>(k)) = g.row(w[k]);
  return m;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, Eigen::Index n) {
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > 1e-10) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

// Keeps the subset of `candidates` whose rows are linearly independent of the
// equalities and of each other, in index order.
std::vector<Eigen::Index> independent_subset(const Eigen::MatrixXd& e, const Eigen::MatrixXd& g,
                                             const std::vector<Eigen::Index>& candidates) {
  std::vector<Eigen::Index> w;
  Eigen::MatrixXd z = null_space(e, g.cols());
  for (Eigen::Index i : candidates) {
    if (z.cols() == 0) break;
    if ((z.transpose() * g.row(i).transpose()).norm() > 1e-9) {
      w.push_back(i);
      z = null_space(stack_rows(e, g, w), g.cols());
    }
  }
  return w;
}

ActiveSetResult active_set(const Eigen::MatrixXd& hess, const Eigen::VectorXd& lin, const Normalized& c,
                           Eigen::VectorXd x, std::vector<Eigen::Index> working, const QpOptions& opt) {
  const Eigen::Index n = x.size();
  const Eigen::Index mg = c.g.rows();
  const double curvature_tol = 1e-12 * std::max(1.0, hess.cwiseAbs().maxCoeff());
  ActiveSetResult out;
  bool last_step_degenerate = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::MatrixXd m = stack_rows(c.e, c.g, working);
    const Eigen::MatrixXd z = null_space(m, n);
    const Eigen::VectorXd grad = hess * x + lin;
    const double grad_scale = std::max(1.0, grad.cwiseAbs().maxCoeff());

    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    bool ray = false;
    if (z.cols() > 0) {
      const Eigen::MatrixXd hz = z.transpose() * hess * z;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (hz + hz.transpose()));
      const Eigen::VectorXd q = eig.eigenvectors().transpose() * (z.transpose() * grad);
      Eigen::VectorXd flat = Eigen::VectorXd::Zero(q.size());
      Eigen::VectorXd newton = Eigen::VectorXd::Zero(q.size());
      for (Eigen::Index k = 0; k < q.size(); ++k) {
        if (eig.eigenvalues()[k] > curvature_tol)
          newton[k] = -q[k] / eig.eigenvalues()[k];
        else
          flat[k] = -q[k];
      }
      if (flat.norm() > 1e-13 * grad_scale) {
        ray = true;
        d = z * (eig.eigenvectors() * flat);
      } else {
        d = z * (eig.eigenvectors() * newton);
      }
    }

    if (d.norm() > 1e-14 * std::max(1.0, x.norm())) {
      double step = ray ? std::numeric_limits<double>::infinity() : 1.0;
      Eigen::Index blocking = -1;
      const double dn = d.norm();
      for (Eigen::Index i = 0; i < mg; ++i) {
        if (std::find(working.begin(), working.end(), i) != working.end()) continue;
        const double ad = c.g.row(i).dot(d);
        if (ad <= 1e-12 * dn) continue;
        const double ratio = std::max(0.0, (c.h[i] - c.g.row(i).dot(x)) / ad);
        if (ratio < step) {
          step = ratio;
          blocking = i;
        }
      }
      if (!std::isfinite(step)) throw std::domain_error("solve_qp: objective is unbounded below");
      x += step * d;
      last_step_degenerate = step * dn <= 1e-14 * std::max(1.0, x.norm());
      if (blocking >= 0) {
        working.push_back(blocking);
        continue;
      }
      if (ray) continue;
    }

    // Stationary on the current working set: check the multipliers.
    const Eigen::MatrixXd mt = m.transpose();
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m.rows());
    if (m.rows() > 0) lambda = mt.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-(hess * x + lin));
    const Eigen::Index ne = c.e.rows();
    Eigen::Index drop = -1;
    double most_negative = -opt.optimality_tol * grad_scale;
    for (std::size_t k = 0; k < working.size(); ++k) {
      const double l = lambda[ne + static_cast<Eigen::Index>(k)];
      if (last_step_degenerate) {
        // Bland's rule: smallest constraint index with a negative multiplier.
        if (l < -opt.optimality_tol * grad_scale && (drop < 0 || working[k] < working[static_cast<std::size_t>(drop)]))
          drop = static_cast<Eigen::Index>(k);
      } else if (l < most_negative) {
        most_negative = l;
        drop = static_cast<Eigen::Index>(k);
      }
    }
    if (drop < 0) {
      out.status = QpStatus::optimal;
      out.lambda_e = lambda.head(ne);
      out.lambda_g = Eigen::VectorXd::Zero(mg);
      for (std::size_t k = 0; k < working.size(); ++k)
        out.lambda_g[working[k]] = std::max(0.0, lambda[ne + static_cast<Eigen::Index>(k)]);
      out.x = x;
      out.working = working;
      return out;
    }
    working.erase(working.begin() + drop);
  }
  out.status = QpStatus::max_iterations;
  out.x = x;
  out.lambda_g = Eigen::VectorXd::Zero(mg);
  out.lambda_e = Eigen::VectorXd::Zero(c.e.rows());
  out.working = working;
  return out;
}

std::vector<Eigen::Index> active_at(const Normalized& c, const Eigen::VectorXd& x, double tol) {
  std::vector<Eigen::Index> act;
  for (Eigen::Index i = 0; i < c.g.rows(); ++i)
    if (c.g.row(i).dot(x) >= c.h[i] - tol) act.push_back(i);
  return act;
}

double normalized_violation(const Normalized& c, const Eigen::VectorXd& x) {
  double v = 0.0;
  if (c.g.rows() > 0) v = std::max(v, (c.g * x - c.h).maxCoeff());
  if (c.e.rows() > 0) v = std::max(v, (c.e * x - c.e_rhs).cwiseAbs().maxCoeff());
  return v;
}

// Minimizes the largest inequality violation t over {E x = e}. Returns the
// point and the attained t.
std::pair<Eigen::VectorXd, double> phase_one(const Normalized& c, const Eigen::VectorXd& start,
                                             const QpOptions& opt) {
  const Eigen::Index n = start.size();
  Eigen::VectorXd x = start;
  if (c.e.rows() > 0) {
    const Eigen::VectorXd r = c.e_rhs - c.e * x;
    x += c.e.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(r);
    const double eq_residual = (c.e * x - c.e_rhs).cwiseAbs().maxCoeff();
    if (eq_residual > 1e-8) return {x, std::numeric_limits<double>::infinity()};
  }
  double t = 0.0;
  if (c.g.rows() > 0) t = std::max(0.0, (c.g * x - c.h).maxCoeff());
  if (t <= opt.feasibility_tol) return {x, t};

  Normalized aug;
  const Eigen::Index mg = c.g.rows();
  aug.g = Eigen::MatrixXd::Zero(mg + 1, n + 1);
  aug.h = Eigen::VectorXd::Zero(mg + 1);
  for (Eigen::Index i = 0; i < mg; ++i) {
    Eigen::VectorXd row(n + 1);
    row << c.g.row(i).transpose(), -1.0;
    const double len = row.norm();
    aug.g.row(i) = row.transpose() / len;
    aug.h[i] = c.h[i] / len;
  }
  aug.g(mg, n) = -1.0;
  aug.e = Eigen::MatrixXd::Zero(c.e.rows(), n + 1);
  aug.e.leftCols(n) = c.e;
  aug.e_rhs = c.e_rhs;

  Eigen::VectorXd y(n + 1);
  y << x, t;
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(n + 1);
  lin[n] = 1.0;
  const auto working = independent_subset(aug.e, aug.g, active_at(aug, y, 1e-12));
  QpOptions o = opt;
  o.max_iterations = std::max(opt.max_iterations, 20 * static_cast<int>(n + mg + 1));
  const auto r = active_set(Eigen::MatrixXd::Zero(n + 1, n + 1), lin, aug, y, working, o);
  return {r.x.head(n), std::max(0.0, r.x[n])};
}

}  // namespace

double QpProblem::violation(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (Eigen::Index i = 0; i < a_ineq.rows(); ++i) {
    const double len = a_ineq.row(i).norm();
    const double s = a_ineq.row(i).dot(x) - b_ineq[i];
    v = std::max(v, len > 0.0 ? s / len : s);
  }
  for (Eigen::Index i = 0; i < a_eq.rows(); ++i) {
    const double len = a_eq.row(i).norm();
    const double s = std::abs(a_eq.row(i).dot(x) - b_eq[i]);
    v = std::max(v, len > 0.0 ? s / len : s);
  }
  if (nonnegative && x.size() > 0) v = std::max(v, -x.minCoeff());
  return v;
}

QpResult solve_qp(const QpProblem& problem, const QpOptions& options) {
  return solve_qp(problem, Eigen::VectorXd::Zero(problem.size()), options);
}

QpResult solve_qp(const QpProblem& problem, const Eigen::VectorXd& start, const QpOptions& options) {
  const Eigen::Index n = problem.size();
  if (problem.hessian.rows() != n || problem.hessian.cols() != n || start.size() != n ||
      (problem.a_ineq.rows() > 0 && problem.a_ineq.cols() != n) || problem.a_ineq.rows() != problem.b_ineq.size() ||
      (problem.a_eq.rows() > 0 && problem.a_eq.cols() != n) || problem.a_eq.rows() != problem.b_eq.size())
    throw std::invalid_argument("solve_qp: inconsistent dimensions");
  if (!problem.hessian.allFinite() || !problem.linear.allFinite() || !start.allFinite())
    throw std::invalid_argument("solve_qp: non-finite input");

  double scale = std::max(problem.hessian.cwiseAbs().maxCoeff(), problem.linear.cwiseAbs().maxCoeff());
  if (!(scale > 0.0)) scale = 1.0;
  Eigen::MatrixXd hess = 0.5 * (problem.hessian + problem.hessian.transpose()) / scale;
  const Eigen::VectorXd lin = problem.linear / scale;
  {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
    const double top = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -options.psd_tol * top)
      throw std::invalid_argument("solve_qp: Hessian is not positive semidefinite");
    if (eig.eigenvalues().minCoeff() < 0.0)
      hess = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() * eig.eigenvectors().transpose();
  }

  const Normalized c = normalize_constraints(problem, options.feasibility_tol);
  const Eigen::Index total = problem.a_ineq.rows() + (problem.nonnegative ? n : 0) + problem.a_eq.rows();
  QpResult result;
  result.multipliers = Eigen::VectorXd::Zero(total);
  if (c.trivially_infeasible) {
    result.x = start;
    result.infeasibility = std::numeric_limits<double>::infinity();
    return result;
  }

  Eigen::VectorXd x = start;
  if (normalized_violation(c, x) > options.feasibility_tol) {
    const auto [y, t] = phase_one(c, start, options);
    x = y;
    if (!(t <= options.feasibility_tol)) {
      result.x = x;
      result.infeasibility = t;
      result.objective = problem.objective(x);
      return result;
    }
  }

  const auto working = independent_subset(c.e, c.g, active_at(c, x, options.feasibility_tol));
  const ActiveSetResult r = active_set(hess, lin, c, x, working, options);
  result.x = r.x;
  result.status = r.status;
  result.iterations = r.iterations;
  result.objective = problem.objective(r.x);
  for (Eigen::Index k = 0; k < c.g.rows(); ++k)
    result.multipliers[c.g_origin[static_cast<std::size_t>(k)]] =
        scale * r.lambda_g[k] / c.g_norm[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 0; k < c.e.rows(); ++k)
    result.multipliers[c.e_origin[static_cast<std::size_t>(k)]] =
        scale * r.lambda_e[k] / c.e_norm[static_cast<std::size_t>(k)];
  return result;
}

KktResiduals kkt_residuals(const QpProblem& problem, const QpResult& result) {
  const Eigen::Index n = problem.size();
  const Eigen::Index mi = problem.a_ineq.rows();
  const Eigen::Index mb = problem.nonnegative ? n : 0;
  const Eigen::Index me = problem.a_eq.rows();
  const Eigen::VectorXd& x = result.x;
  const Eigen::VectorXd& l = result.multipliers;
  const Eigen::VectorXd hx = problem.hessian * x;
  Eigen::VectorXd r = hx + problem.linear;
  double scale = hx.cwiseAbs().maxCoeff() + problem.linear.cwiseAbs().maxCoeff();
  if (mi > 0) {
    const Eigen::VectorXd t = problem.a_ineq.transpose() * l.head(mi);
    r += t;
    scale = std::max(scale, t.cwiseAbs().maxCoeff());
  }
  if (mb > 0) r -= l.segment(mi, mb);
  if (me > 0) {
    const Eigen::VectorXd t = problem.a_eq.transpose() * l.tail(me);
    r += t;
    scale = std::max(scale, t.cwiseAbs().maxCoeff());
  }
  if (!(scale > 0.0)) scale = 1.0;

  KktResiduals k;
  k.stationarity = r.cwiseAbs().maxCoeff() / scale;
  k.primal = problem.violation(x);
  for (Eigen::Index i = 0; i < mi; ++i) {
    const double len = problem.a_ineq.row(i).norm();
    const double slack = (problem.b_ineq[i] - problem.a_ineq.row(i).dot(x));
    k.complementarity = std::max(k.complementarity, std::abs(l[i] * slack) / scale);
    k.dual = std::max(k.dual, -l[i] * len / scale);
  }
  for (Eigen::Index j = 0; j < mb; ++j) {
    k.complementarity = std::max(k.complementarity, std::abs(l[mi + j] * x[j]) / scale);
    k.dual = std::max(k.dual, -l[mi + j] / scale);
  }
  return k;
}

}  // namespace vvlc
