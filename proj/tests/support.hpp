#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace vvlc::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, double lo = -1.0, double hi = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
  return m;
}

inline Eigen::VectorXd random_unit(Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng());
  return v.normalized();
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace vvlc::test
