#include "vvlc/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vvlc/geometry.hpp"

namespace vvlc {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void NoiseModel::validate() const {
  if (!(thermal_w > 0.0) || !(electron_charge > 0.0) || !(bandwidth_hz > 0.0))
    throw std::invalid_argument("noise model: all parameters must be positive");
}

double shot_noise_jensen(const Eigen::MatrixXd& channel, std::span<const Eigen::VectorXd> precoders,
                         const NoiseModel& noise, double alpha, double ptx_w) {
  double sum = (channel * Eigen::VectorXd::Ones(channel.cols())).squaredNorm();
  for (const auto& f : precoders) sum += alpha * alpha * (channel * f).squaredNorm();
  return noise.gamma() * ptx_w * std::sqrt(sum);
}

double shot_noise_constant(double top_eigenvalue, std::size_t nt, std::size_t users, double alpha, double gamma,
                           double ptx_w) {
  if (top_eigenvalue < 0.0) throw std::invalid_argument("shot_noise_constant: negative eigenvalue");
  return gamma * ptx_w * (std::sqrt(static_cast<double>(nt)) + alpha * static_cast<double>(users)) *
         std::sqrt(top_eigenvalue);
}

Eigen::MatrixXd leakage_matrix(std::span<const Eigen::MatrixXd> leaked, double alpha, double ptx_w) {
  if (leaked.empty()) throw std::invalid_argument("leakage_matrix: no channels");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(leaked.front().cols(), leaked.front().cols());
  for (const auto& h : leaked) l.noalias() += h.transpose() * h;
  return alpha * alpha * ptx_w * ptx_w * l;
}

double slnr_objective(const Eigen::MatrixXd& channel, const Eigen::MatrixXd& leakage, double regularizer,
                      double alpha, double ptx_w, const Eigen::VectorXd& f) {
  const double den = f.dot(leakage * f) + regularizer * f.squaredNorm();
  return alpha * alpha * ptx_w * ptx_w * (channel * f).squaredNorm() / den;
}

namespace {

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k] - 1e-12) return true;
    if (a[k] > b[k] + 1e-12) return false;
  }
  return false;
}

}  // namespace

SlnrSolution solve_slnr(const Eigen::MatrixXd& channel, const Eigen::MatrixXd& leakage, double regularizer,
                        double alpha, double ptx_w) {
  const Eigen::Index n = channel.cols();
  if (leakage.rows() != n || leakage.cols() != n) throw std::invalid_argument("solve_slnr: leakage size mismatch");
  if (!channel.allFinite() || !leakage.allFinite() || !std::isfinite(regularizer))
    throw std::invalid_argument("solve_slnr: non-finite input");
  if (!(regularizer > 0.0)) throw std::invalid_argument("solve_slnr: regularizer must be positive");

  const Eigen::MatrixXd num = channel.transpose() * channel;
  Eigen::MatrixXd den = leakage;
  den.diagonal().array() += regularizer;
  // Both sides are rescaled so the whitening works on O(1) numbers.
  const double den_scale = den.trace() / static_cast<double>(n);
  const double num_scale = num.trace() > 0.0 ? num.trace() : 1.0;
  const Eigen::MatrixXd d = 0.5 * (den + den.transpose()) / den_scale;
  const Eigen::MatrixXd a = 0.5 * (num + num.transpose()) / num_scale;

  const Eigen::LLT<Eigen::MatrixXd> chol(d);
  if (chol.info() != Eigen::Success) throw std::invalid_argument("solve_slnr: denominator is not positive definite");
  const Eigen::MatrixXd lower = chol.matrixL();
  const Eigen::MatrixXd left = lower.triangularView<Eigen::Lower>().solve(a);
  const Eigen::MatrixXd whitened = lower.triangularView<Eigen::Lower>().solve(left.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (whitened + whitened.transpose()));
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double top = values[n - 1];

  std::vector<Eigen::VectorXd> candidates;
  const double tie = 1e-10 * std::max(std::abs(top), 1e-300);
  for (Eigen::Index k = n - 1; k >= 0 && top - values[k] <= tie; --k) {
    Eigen::VectorXd f = lower.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors().col(k));
    f.normalize();
    normalize_sign(f);
    candidates.push_back(std::move(f));
  }

  SlnrSolution best;
  double best_value = -1.0;
  for (const auto& f : candidates) {
    const double v = f.dot(a * f) / f.dot(d * f);
    const bool better = v > best_value * (1.0 + 1e-12) ||
                        (std::abs(v - best_value) <= 1e-12 * std::abs(best_value) && lexicographically_less(f, best.f));
    if (best.f.size() == 0 || better) {
      best.f = f;
      best_value = v;
    }
  }
  best.eigenvalue = best.f.dot(num * best.f) / best.f.dot(den * best.f);
  best.slnr = alpha * alpha * ptx_w * ptx_w * best.eigenvalue;
  return best;
}

Eigen::VectorXd mrt_precoder(const Eigen::MatrixXd& channel) {
  if (channel.size() == 0 || channel.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("mrt_precoder: zero channel");
  const double scale = channel.cwiseAbs().maxCoeff();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(channel / scale, Eigen::ComputeFullV);
  Eigen::VectorXd f = svd.matrixV().col(0);
  f.normalize();
  normalize_sign(f);
  return f;
}

}  // namespace vvlc
