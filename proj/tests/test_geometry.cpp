#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vvlc/geometry.hpp"

using namespace vvlc;

TEST_CASE("Lambertian order") {
  CHECK(lambertian_order(60.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(lambertian_order(20.0) - 11.143) <= 1e-3);
  CHECK_THROWS_AS(lambertian_order(0.0), std::domain_error);
  CHECK_THROWS_AS(lambertian_order(90.0), std::domain_error);
  CHECK(Radiometry{}.lambertian_order() == lambertian_order(20.0));
}

TEST_CASE("LOS gain on boresight and off axis") {
  const Aperture led{{0, 0, 0}, {0, 1, 0}};
  const Aperture pd{{0, 10, 0}, {0, -1, 0}};
  CHECK(los_gain(led, pd, 1.0, 1e-4) == doctest::Approx(2.0 * 1e-4 / (2.0 * std::numbers::pi * 100.0)));
  const Aperture off{{3, 4, 0}, {0, -1, 0}};
  const double n = 11.143;
  const double expect = (n + 1) * 1e-4 / (2 * std::numbers::pi * 25.0) * std::pow(0.8, n) * 0.8;
  CHECK(los_gain(led, off, n, 1e-4) == doctest::Approx(expect));
  const Aperture behind{{0, -5, 0}, {0, -1, 0}};
  CHECK(los_gain(led, behind, n, 1e-4) == 0.0);
  CHECK_THROWS_AS(los_gain(led, led, n, 1e-4), std::invalid_argument);
}

TEST_CASE("NLOS gain is the product of two hops") {
  const Radiometry rad;
  const Aperture led{{0, 0, 1}, {0, 1, 0}};
  const Aperture ref{{0, 5, 0}, {0, 0, 1}};
  const Aperture pd{{0, 10, 1}, {0, -1, 0}};
  const double n = rad.lambertian_order();
  const Eigen::Vector3d d1 = ref.position - led.position, d2 = pd.position - ref.position;
  const double c1 = d1.normalized().dot(led.normal), t1 = -d1.normalized().dot(ref.normal);
  const double c2 = d2.normalized().dot(ref.normal), t2 = -d2.normalized().dot(pd.normal);
  const double hop1 = (n + 1) * rad.reflector_area_m2 * std::pow(c1, n) * t1 / (2 * std::numbers::pi * d1.squaredNorm());
  const double hop2 = rad.pd_area_m2 * c2 * t2 / (std::numbers::pi * d2.squaredNorm()) * 0.8;
  CHECK(nlos_gain(led, ref, pd, rad, 0.8) == doctest::Approx(hop1 * hop2));
}

TEST_CASE("default path loss") {
  const Scene scene;
  const Radiometry rad;
  const PathLoss pl = path_loss_matrix(scene, rad, 0, 0, 0.91);
  CHECK(pl.los.rows() == 4);
  CHECK(pl.los.cols() == 4);
  CHECK(pl.los.minCoeff() > 0.0);
  CHECK(pl.nlos.minCoeff() >= 0.0);
  CHECK(pl.nlos.maxCoeff() < 1e-2 * pl.los.minCoeff());
  CHECK((pl.combined(true) - pl.los - pl.nlos).norm() <= 1e-15 * pl.los.norm());
  CHECK(condition_number(pl.los) > 1e3);
}

TEST_CASE("mirror symmetry permutes the path loss") {
  Scene scene;
  scene.headlights = {{0.0, 0.0, 1.1}};
  scene.receivers = {{2.0, 15.0, 0.9}, {-2.0, 15.0, 0.9}};
  const Radiometry rad;
  const Eigen::MatrixXd a = path_loss_matrix(scene, rad, 0, 0, 0.91).combined(true);
  const Eigen::MatrixXd b = path_loss_matrix(scene, rad, 1, 0, 0.91).combined(true);
  const auto leds = scene.led_positions(0);
  const auto pa = scene.pd_positions(0), pb = scene.pd_positions(1);
  auto mirror_of = [](const auto& from, const auto& to, std::size_t k) {
    for (std::size_t j = 0; j < to.size(); ++j)
      if ((Eigen::Vector3d(-from[k].x(), from[k].y(), from[k].z()) - to[j]).norm() < 1e-12) return j;
    FAIL("no mirror image");
    return std::size_t{0};
  };
  for (std::size_t n = 0; n < pa.size(); ++n)
    for (std::size_t m = 0; m < leds.size(); ++m) {
      const auto n2 = static_cast<Eigen::Index>(mirror_of(pa, pb, n));
      const auto m2 = static_cast<Eigen::Index>(mirror_of(leds, leds, m));
      CHECK(b(n2, m2) == doctest::Approx(a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m))).epsilon(1e-12));
    }
}

TEST_CASE("wider photodiode spacing decorrelates the channel") {
  Scene scene;
  scene.receivers = {{0.0, 5.0, 0.9}};
  const Radiometry rad;
  const double tight = condition_number(path_loss_matrix(scene, rad, 0, 0, 0.91).los);
  scene.pd_spacing_m = 1.0;
  scene.led_spacing_m = 0.5;
  const double wide = condition_number(path_loss_matrix(scene, rad, 0, 0, 0.91).los);
  CHECK(wide * 100.0 < tight);
}

TEST_CASE("azimuth") {
  CHECK(azimuth_deg({0, 0, 0}, {0, 10, 0}) == doctest::Approx(0.0));
  CHECK(azimuth_deg({0, 0, 0}, {10, 10, 0}) == doctest::Approx(45.0));
  CHECK(azimuth_deg({0, 0, 0}, {-10, 10, 5}) == doctest::Approx(-45.0));
  CHECK_THROWS_AS(azimuth_deg({0, 0, 0}, {1, -1, 0}), std::invalid_argument);
  const Scene scene;
  CHECK(azimuth_of(scene, 2, 0) > 0.0);
  CHECK(led_azimuths(scene, 0, 0).size() == 4);
}

TEST_CASE("square layout") {
  const auto pts = square_layout(4, 0.04);
  REQUIRE(pts.size() == 4);
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pts) {
    c += p;
    CHECK(p.y() == 0.0);
  }
  CHECK(c.norm() <= 1e-15);
  CHECK((pts[0] - pts[1]).norm() == doctest::Approx(0.04));
}

TEST_CASE("scene validation") {
  Scene s;
  CHECK_NOTHROW(s.validate());
  s.receivers = {{0, 20, 0.9}, {0, 20, 0.9}};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = Scene{};
  s.headlights[0].z() = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("rank-one approximation and condition number") {
  const Eigen::MatrixXd h = test::random_matrix(4, 4, 0.0, 1.0);
  const RankOneApprox r = rank1_approx(h);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeFullV);
  CHECK(r.eigenvalue == doctest::Approx(svd.singularValues()[0] * svd.singularValues()[0]));
  CHECK(std::abs(r.direction.dot(svd.matrixV().col(0))) == doctest::Approx(1.0));
  CHECK(condition_number(h) == doctest::Approx(condition_number(h * 3.7e-9)));
  CHECK(std::isinf(condition_number(Eigen::MatrixXd::Ones(3, 3))));
  Eigen::VectorXd v(3);
  v << 0.0, -2.0, 1.0;
  normalize_sign(v);
  CHECK(v[1] == 2.0);
}

TEST_CASE("effective channel") {
  const Eigen::MatrixXd h = test::random_matrix(2, 2, 0.0, 1.0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 6);
  g.block(0, 0, 1, 3) << 1, 2, 3;
  g.block(1, 3, 1, 3) << 4, 5, 6;
  Eigen::VectorXd p(6);
  p << 1, 0, 0, 0, 0, 1;
  const Eigen::MatrixXd e = effective_channel(h, g, p);
  CHECK(e(0, 0) == doctest::Approx(h(0, 0)));
  CHECK(e(1, 1) == doctest::Approx(6 * h(1, 1)));
}
