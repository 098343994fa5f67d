#include "vvlc/rgb_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vvlc {

Eigen::MatrixXd LinkData::effective(const Eigen::VectorXd& p) const {
  return path_loss * (gain * p).asDiagonal();
}

void HeadlightProblem::validate() const {
  if (links.empty()) throw std::invalid_argument("headlight problem: no receivers");
  if (served.empty()) throw std::invalid_argument("headlight problem: no served receivers");
  const Eigen::Index nt = links.front().path_loss.cols();
  for (const auto& l : links) {
    if (l.path_loss.cols() != nt || l.gain.rows() != nt || l.gain.cols() != 3 * nt || l.color.size() != 3 * nt)
      throw std::invalid_argument("headlight problem: inconsistent link dimensions");
  }
  for (std::size_t s : served)
    if (s >= links.size()) throw std::invalid_argument("headlight problem: served receiver out of range");
  if (!(ptx_w >= 0.0) || !(alpha >= 0.0)) throw std::invalid_argument("headlight problem: negative power or index");
  noise.validate();
}

Eigen::MatrixXd led_sum_matrix(std::size_t nt) {
  const auto n = static_cast<Eigen::Index>(nt);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, 3 * n);
  for (Eigen::Index m = 0; m < n; ++m) s.block(m, 3 * m, 1, 3).setOnes();
  return s;
}

Eigen::MatrixXd precoder_expansion(const Eigen::VectorXd& f) {
  Eigen::VectorXd d(3 * f.size());
  for (Eigen::Index m = 0; m < f.size(); ++m) d.segment(3 * m, 3).setConstant(f[m]);
  return d.asDiagonal();
}

StrictWhiteResult init_ratios_strict(std::span<const ColorMap> receivers, const Chromaticity& target,
                                     const QpOptions& options) {
  const Eigen::MatrixXd tw = strict_white_matrix(receivers, target);
  const auto nt = static_cast<std::size_t>(tw.cols() / 3);
  const Eigen::MatrixXd sum = led_sum_matrix(nt);
  QpProblem qp;
  qp.hessian = 2.0 * sum.transpose() * sum;
  qp.linear = -2.0 * sum.transpose() * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(nt));
  qp.a_ineq = Eigen::MatrixXd(0, tw.cols());
  qp.b_ineq = Eigen::VectorXd(0);
  qp.a_eq = tw;
  qp.b_eq = Eigen::VectorXd::Zero(tw.rows());
  const QpResult r = solve_qp(qp, Eigen::VectorXd::Zero(tw.cols()), options);

  StrictWhiteResult out;
  out.status = r.status;
  out.p = r.x.cwiseMax(0.0);
  const Eigen::VectorXd sums = sum * out.p;
  out.residual = (sums - Eigen::VectorXd::Ones(sums.size())).norm();
  out.feasible = r.status == QpStatus::optimal && out.p.maxCoeff() > 1e-9;
  if (out.feasible && sums.maxCoeff() > 1.0) out.p /= sums.maxCoeff();
  return out;
}

std::vector<SlnrTerms> slnr_terms_of_p(const HeadlightProblem& problem, std::span<const Eigen::VectorXd> precoders,
                                       const Eigen::VectorXd& p) {
  if (precoders.size() != problem.served.size())
    throw std::invalid_argument("slnr_terms_of_p: one precoder per served receiver required");
  const double a2p2 = problem.alpha * problem.alpha * problem.ptx_w * problem.ptx_w;
  std::vector<Eigen::MatrixXd> hbar;
  hbar.reserve(problem.links.size());
  for (const auto& l : problem.links) hbar.push_back(l.hbar());
  std::vector<Eigen::VectorXd> fp;
  for (const auto& f : precoders) fp.push_back(precoder_expansion(f) * p);

  std::vector<SlnrTerms> out;
  for (std::size_t k = 0; k < problem.served.size(); ++k) {
    const std::size_t r = problem.served[k];
    SlnrTerms t;
    t.signal = a2p2 * (hbar[r] * fp[k]).squaredNorm();
    for (std::size_t v = 0; v < hbar.size(); ++v)
      if (v != r) t.leakage += a2p2 * (hbar[v] * fp[k]).squaredNorm();
    double inner = (hbar[r] * p).squaredNorm();
    for (const auto& x : fp) inner += problem.alpha * problem.alpha * (hbar[r] * x).squaredNorm();
    t.shot = problem.noise.gamma() * problem.ptx_w * std::sqrt(inner);
    out.push_back(t);
  }
  return out;
}

double sum_slnr(std::span<const SlnrTerms> terms, double thermal_w) {
  double s = 0.0;
  for (const auto& t : terms) s += t.ratio(thermal_w);
  return s;
}

double sum_slnr(const HeadlightProblem& problem, std::span<const Eigen::VectorXd> precoders,
                const Eigen::VectorXd& p) {
  const auto t = slnr_terms_of_p(problem, precoders, p);
  return sum_slnr(t, problem.noise.thermal_w);
}

double quadratic_transform(double signal, double leakage, double shot, double thermal_w, double nu) {
  return 2.0 * nu * std::sqrt(signal) - nu * nu * (leakage + shot + thermal_w);
}

double optimal_nu(double signal, double leakage, double shot, double thermal_w) {
  const double den = leakage + shot + thermal_w;
  if (!(den > 0.0)) throw std::domain_error("optimal_nu: denominator must be positive");
  return std::sqrt(signal) / den;
}

RatioForms ratio_forms(const HeadlightProblem& problem, std::span<const Eigen::VectorXd> precoders,
                       std::size_t served_index) {
  const std::size_t r = problem.served.at(served_index);
  const Eigen::MatrixXd f = precoder_expansion(precoders[served_index]);
  const Eigen::Index n = f.rows();
  RatioForms out;
  const Eigen::MatrixXd own = problem.links[r].hbar();
  const Eigen::MatrixXd gram = own.transpose() * own;
  out.signal = f * gram * f;
  out.leakage = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t v = 0; v < problem.links.size(); ++v) {
    if (v == r) continue;
    const Eigen::MatrixXd h = problem.links[v].hbar();
    out.leakage.noalias() += f * (h.transpose() * h) * f;
  }
  out.shot = gram;
  for (const auto& fv : precoders) {
    const Eigen::MatrixXd e = precoder_expansion(fv);
    out.shot.noalias() += problem.alpha * problem.alpha * e * gram * e;
  }
  return out;
}

Linearization linearize(const RatioForms& forms, const Eigen::VectorXd& p, double alpha, double ptx_w, double gamma) {
  const double a2p2 = alpha * alpha * ptx_w * ptx_w;
  const Eigen::VectorXd ap = forms.signal * p;
  const Eigen::VectorXd bp = forms.shot * p;
  const double signal = a2p2 * p.dot(ap);
  const double shot = gamma * ptx_w * std::sqrt(std::max(0.0, p.dot(bp)));
  if (!(signal > 0.0) || !(shot > 0.0)) throw std::domain_error("linearize: zero value at the expansion point");
  Linearization l;
  l.sqrt_signal = {std::sqrt(signal), a2p2 * ap / std::sqrt(signal), p};
  l.shot = {shot, gamma * gamma * ptx_w * ptx_w * bp / shot, p};
  return l;
}

QpProblem ratio_feasible_set(const HeadlightProblem& problem, const QuadrangleConstraint& quadrangle) {
  const std::size_t nt = problem.led_count();
  const auto n = static_cast<Eigen::Index>(3 * nt);
  const auto links = static_cast<Eigen::Index>(problem.links.size());
  QpProblem qp;
  qp.hessian = Eigen::MatrixXd::Zero(n, n);
  qp.linear = Eigen::VectorXd::Zero(n);
  qp.a_ineq.resize(static_cast<Eigen::Index>(nt) + 4 * links, n);
  qp.b_ineq = Eigen::VectorXd::Zero(qp.a_ineq.rows());
  qp.a_ineq.topRows(static_cast<Eigen::Index>(nt)) = led_sum_matrix(nt);
  qp.b_ineq.head(static_cast<Eigen::Index>(nt)).setOnes();
  for (Eigen::Index v = 0; v < links; ++v)
    qp.a_ineq.middleRows(static_cast<Eigen::Index>(nt) + 4 * v, 4) =
        quadrangle_rows(quadrangle, problem.links[static_cast<std::size_t>(v)].color);
  qp.a_eq = Eigen::MatrixXd(0, n);
  qp.b_eq = Eigen::VectorXd(0);
  return qp;
}

namespace {

struct UserModel {
  RatioForms forms;
  double sqrt_signal = 0.0;
  Eigen::VectorXd signal_gradient;
  double shot = 0.0;
  Eigen::VectorXd shot_gradient;
  double nu = 0.0;
};

// Expansion of every served receiver at p. A zero signal contributes a zero
// gradient (a valid subgradient of the norm at the origin).
void expand(const HeadlightProblem& problem, std::vector<UserModel>& users, const Eigen::VectorXd& p) {
  const double a2p2 = problem.alpha * problem.alpha * problem.ptx_w * problem.ptx_w;
  const double gamma = problem.noise.gamma();
  for (auto& u : users) {
    const Eigen::VectorXd ap = u.forms.signal * p;
    const Eigen::VectorXd bp = u.forms.shot * p;
    const double signal = a2p2 * std::max(0.0, p.dot(ap));
    u.sqrt_signal = std::sqrt(signal);
    u.signal_gradient = signal > 0.0 ? Eigen::VectorXd(a2p2 * ap / u.sqrt_signal) : Eigen::VectorXd::Zero(p.size());
    u.shot = gamma * problem.ptx_w * std::sqrt(std::max(0.0, p.dot(bp)));
    u.shot_gradient = u.shot > 0.0 ? Eigen::VectorXd(gamma * gamma * problem.ptx_w * problem.ptx_w * bp / u.shot)
                                   : Eigen::VectorXd::Zero(p.size());
  }
}

void refresh_nu(const HeadlightProblem& problem, std::vector<UserModel>& users, const Eigen::VectorXd& p) {
  const double a2p2 = problem.alpha * problem.alpha * problem.ptx_w * problem.ptx_w;
  for (auto& u : users) {
    const double leak = a2p2 * p.dot(u.forms.leakage * p);
    u.nu = optimal_nu(u.sqrt_signal * u.sqrt_signal, leak, u.shot, problem.noise.thermal_w);
  }
}

}  // namespace

ScaResult sca_loop(const HeadlightProblem& problem, std::span<const Eigen::VectorXd> precoders,
                   const QuadrangleConstraint& quadrangle, const Eigen::VectorXd& start, const ScaOptions& options) {
  problem.validate();
  const QpProblem feasible = ratio_feasible_set(problem, quadrangle);
  if (start.size() != feasible.size()) throw std::invalid_argument("sca_loop: ratio vector size mismatch");
  if (feasible.violation(start) > 1e-9) throw std::invalid_argument("sca_loop: start point is infeasible");

  const double a2p2 = problem.alpha * problem.alpha * problem.ptx_w * problem.ptx_w;
  const double thermal = problem.noise.thermal_w;
  Eigen::VectorXd p = start;
  {
    const auto terms = slnr_terms_of_p(problem, precoders, p);
    const bool degenerate = std::any_of(terms.begin(), terms.end(), [](const SlnrTerms& t) { return !(t.signal > 0.0); });
    if (degenerate) {
      const Eigen::VectorXd nudged = (p.array() + 1e-6).matrix();
      if (feasible.violation(nudged) <= 1e-9) p = nudged;
    }
  }

  std::vector<UserModel> users(problem.served.size());
  for (std::size_t k = 0; k < users.size(); ++k) users[k].forms = ratio_forms(problem, precoders, k);

  ScaResult out;
  double current = sum_slnr(problem, precoders, p);
  out.objective_trace.push_back(current);
  expand(problem, users, p);
  refresh_nu(problem, users, p);

  for (int it = 0; it < options.max_iterations; ++it) {
    if (it > 0) {
      expand(problem, users, p);
      if (options.refresh_nu_each_iteration) refresh_nu(problem, users, p);
    }
    QpProblem qp = feasible;
    for (const auto& u : users) {
      qp.hessian.noalias() += 2.0 * u.nu * u.nu * a2p2 * u.forms.leakage;
      qp.linear.noalias() -= 2.0 * u.nu * u.signal_gradient - u.nu * u.nu * u.shot_gradient;
    }
    qp.hessian = 0.5 * (qp.hessian + qp.hessian.transpose());
    const QpResult r = solve_qp(qp, p, options.qp);
    Eigen::VectorXd target = r.x;
    if (feasible.violation(target) > 1e-9) target = p;

    double model = 0.0;
    for (const auto& u : users) {
      const Eigen::VectorXd d = target - p;
      model += 2.0 * u.nu * (u.sqrt_signal + u.signal_gradient.dot(d)) -
               u.nu * u.nu * (a2p2 * target.dot(u.forms.leakage * target) + u.shot + u.shot_gradient.dot(d) + thermal);
    }
    out.model_trace.push_back(model);
    out.iterations = it + 1;

    // The shot-noise expansion under-estimates a convex term, so the model
    // can promise more than the true objective delivers; backtrack on it.
    const Eigen::VectorXd step = target - p;
    bool moved = false;
    double next = current;
    Eigen::VectorXd candidate = p;
    for (double t = 1.0; t >= 1.0 / 1048576.0; t *= 0.5) {
      candidate = p + t * step;
      const double v = sum_slnr(problem, precoders, candidate);
      if (v >= current) {
        next = v;
        moved = true;
        break;
      }
    }
    if (!moved) {
      out.objective_trace.push_back(current);
      out.converged = true;
      break;
    }
    const double change = std::abs(next - current);
    p = candidate;
    out.objective_trace.push_back(next);
    const double ref = std::max(std::abs(current), 1e-300);
    current = next;
    if (change < options.epsilon * ref) {
      out.converged = true;
      break;
    }
  }
  out.p = p;
  return out;
}

}  // namespace vvlc
