#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "support.hpp"
#include "vvlc/geometry.hpp"
#include "vvlc/precoder.hpp"

using namespace vvlc;

TEST_CASE("unit conversion and noise defaults") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
  const NoiseModel n;
  CHECK(n.thermal_w == doctest::Approx(1.3305e-16).epsilon(1e-3));
  CHECK(n.gamma() == doctest::Approx(2 * 1.602176634e-19 * 1e8));
  NoiseModel bad;
  bad.bandwidth_hz = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("SLNR solution beats random unit vectors") {
  for (int inst = 0; inst < 20; ++inst) {
    const Eigen::MatrixXd h = test::random_matrix(4, 4, 0.0, 1.0);
    const std::vector<Eigen::MatrixXd> leaked = {test::random_matrix(4, 4, 0.0, 1.0),
                                                 test::random_matrix(4, 4, 0.0, 1.0)};
    const double alpha = 0.5, p = 2.0, reg = test::uniform(0.01, 1.0);
    const Eigen::MatrixXd l = leakage_matrix(leaked, alpha, p);
    const SlnrSolution s = solve_slnr(h, l, reg, alpha, p);
    CHECK(s.f.norm() == doctest::Approx(1.0));
    const double best = slnr_objective(h, l, reg, alpha, p, s.f);
    CHECK(best == doctest::Approx(s.slnr).epsilon(1e-10));
    for (int k = 0; k < 20000; ++k) CHECK(slnr_objective(h, l, reg, alpha, p, test::random_unit(4)) <= best + 1e-9 * best);
    const Eigen::MatrixXd a = h.transpose() * h;
    const Eigen::MatrixXd b = l + reg * Eigen::MatrixXd::Identity(4, 4);
    CHECK((a * s.f - s.eigenvalue * b * s.f).norm() <= 1e-8 * (a.norm() + s.eigenvalue * b.norm()));
  }
}

TEST_CASE("SLNR without leakage reduces to maximum ratio") {
  const Eigen::MatrixXd h = test::random_matrix(4, 4, 0.0, 1.0);
  const SlnrSolution s = solve_slnr(h, Eigen::MatrixXd::Zero(4, 4), 1.0, 0.5, 1.0);
  CHECK(std::abs(s.f.dot(mrt_precoder(h))) == doctest::Approx(1.0));
  CHECK_THROWS_AS(solve_slnr(h, Eigen::MatrixXd::Zero(3, 3), 1.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_slnr(h, Eigen::MatrixXd::Zero(4, 4), 0.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mrt_precoder(Eigen::MatrixXd::Zero(4, 4)), std::invalid_argument);
}

TEST_CASE("SLNR avoids a leaked direction") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
  h(0, 0) = 1.0, h(0, 1) = 1.0;
  Eigen::MatrixXd victim = Eigen::MatrixXd::Zero(2, 2);
  victim(0, 0) = 100.0;
  const std::vector<Eigen::MatrixXd> leaked = {victim};
  const SlnrSolution s = solve_slnr(h, leakage_matrix(leaked, 1.0, 1.0), 1e-6, 1.0, 1.0);
  CHECK(std::abs(s.f[0]) < 1e-3);
}

TEST_CASE("Jensen bound dominates the Monte-Carlo shot noise") {
  static constexpr std::array<double, 4> levels = {-3.0, -1.0, 1.0, 3.0};
  const double scale = 1.0 / std::sqrt(5.0);
  std::uniform_int_distribution<int> sym(0, 3);
  const NoiseModel noise;
  for (int inst = 0; inst < 30; ++inst) {
    const Eigen::MatrixXd h = test::random_matrix(4, 4, 0.0, 1.0);
    const std::vector<Eigen::VectorXd> f = {test::random_unit(4), test::random_unit(4), test::random_unit(4)};
    const double alpha = test::uniform(0.1, 1.0), p = test::uniform(0.5, 3.0);
    double mc = 0.0;
    const int draws = 20000;
    for (int k = 0; k < draws; ++k) {
      Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
      for (const auto& fv : f) x += alpha * levels[static_cast<std::size_t>(sym(test::rng()))] * scale * fv;
      mc += (h * x).norm();
    }
    mc *= noise.gamma() * p / draws;
    const double jensen = shot_noise_jensen(h, f, noise, alpha, p);
    CHECK(jensen >= mc * (1 - 1e-3));
    const double constant = shot_noise_constant(rank1_approx(h).eigenvalue, 4, f.size(), alpha, noise.gamma(), p);
    CHECK(constant >= jensen);
  }
}

TEST_CASE("leakage matrix") {
  const std::vector<Eigen::MatrixXd> leaked = {Eigen::MatrixXd::Identity(2, 2), 2 * Eigen::MatrixXd::Identity(2, 2)};
  CHECK(leakage_matrix(leaked, 0.5, 2.0).isApprox(5.0 * Eigen::MatrixXd::Identity(2, 2)));
  CHECK_THROWS_AS(leakage_matrix({}, 0.5, 2.0), std::invalid_argument);
}
