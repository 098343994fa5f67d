#include <doctest.h>

#include <complex>
#include <vector>

#include "support.hpp"
#include "vvlc/gnp_optics.hpp"

using namespace vvlc;

namespace {

using C = std::complex<double>;
using CMat4 = Eigen::Matrix<C, 4, 4>;

// T (N ⊗ N*) T⁻¹ computed literally with complex arithmetic.
Eigen::Matrix4d mueller_by_kronecker(double al, double ar, double dphi) {
  Eigen::Matrix<C, 2, 2> n = Eigen::Matrix<C, 2, 2>::Zero();
  n(0, 0) = std::sqrt(al);
  n(1, 1) = std::sqrt(ar) * std::polar(1.0, dphi);
  CMat4 k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) k(2 * i + r, 2 * j + s) = n(i, j) * std::conj(n(r, s));
  const C j1(0.0, 1.0);
  CMat4 t;
  t << 1, 0, 0, 1, 1, 0, 0, -1, 0, 1, 1, 0, 0, j1, -j1, 0;
  const CMat4 m = t * k * t.inverse();
  CHECK(m.imag().cwiseAbs().maxCoeff() <= 1e-12);
  return m.real();
}

}  // namespace

TEST_CASE("closed-form Mueller matrix equals the Kronecker construction") {
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const ChiralSample s{test::uniform(0.0, 1.0), test::uniform(0.0, 1.0), test::uniform(-3.2, 3.2)};
    const Eigen::Matrix4d ref = mueller_by_kronecker(s.left, s.right, s.phase);
    worst = std::max(worst, (mueller_from_jones(s) - ref).cwiseAbs().maxCoeff());
    CHECK(unpolarized_transmittance(s) == doctest::Approx(0.5 * (s.left + s.right)));
    // First Stokes component after unpolarized light.
    CHECK((mueller_from_jones(s) * Eigen::Vector4d(1, 0, 0, 0))[0] == doctest::Approx(unpolarized_transmittance(s)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("identity plate") {
  const Eigen::Matrix4d m = mueller_from_jones({1.0, 1.0, 0.0});
  CHECK((m - Eigen::Matrix4d::Identity()).norm() <= 1e-15);
}

TEST_CASE("resonance shape and azimuth factor") {
  CHECK(lorentzian(600.0, 600.0, 40.0) == 1.0);
  CHECK(lorentzian(620.0, 600.0, 40.0) == doctest::Approx(0.5));
  Resonance r{600.0, 40.0, 0.5, 0.3, 30.0, 1.0};
  CHECK(azimuth_factor(r, 30.0) == doctest::Approx(1.0));
  CHECK(azimuth_factor(r, -60.0) == doctest::Approx(0.0));
  r.azimuth_sensitivity = 0.0;
  CHECK(azimuth_factor(r, -60.0) == doctest::Approx(0.5));
}

TEST_CASE("cell response") {
  const GnpCell cell{"c", {{600.0, 40.0, 0.6, 0.2, 0.0, 0.0}}};
  const ChiralSample s = cell_response(cell, 600.0, 10.0);
  CHECK(s.left == doctest::Approx(0.7));
  CHECK(s.right == doctest::Approx(0.9));
  CHECK(cell_response(GnpCell{}, 500.0, 0.0).left == 1.0);
  CHECK_THROWS_AS(cell_response(cell, 600.0, 91.0), std::invalid_argument);
  const auto t = cell_transmittance(cell, SpectralGrid{}, 0.0);
  CHECK(t.max_value() <= 1.0);
  CHECK(t.min_value() == doctest::Approx(0.8));
}

TEST_CASE("transparent cells give the bare spectral integral") {
  const SpectralGrid g;
  const SpdSet spds = led_spds(LedSpdModel{}, g);
  const SpectralFunction r = responsivity(ResponsivityModel{}, g);
  const GnpPlate plate = GnpPlate::transparent(2);
  const Eigen::Vector3d gain = gnp_gain_vector(plate.cell_for_led(0), spds, r, 0.0);
  for (int c = 0; c < 3; ++c) CHECK(gain[c] == doctest::Approx(integrate(r * spds[static_cast<std::size_t>(c)])));
  const std::vector<double> az = {0.0, 5.0};
  const Eigen::MatrixXd G = gain_matrix(plate, spds, r, az);
  REQUIRE(G.rows() == 2);
  REQUIRE(G.cols() == 6);
  CHECK(G.block(0, 3, 1, 3).norm() == 0.0);
  CHECK((G.block(1, 3, 1, 3).transpose() - gain).norm() <= 1e-15);
  CHECK_THROWS_AS(gain_matrix(plate, spds, r, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("absorption lowers the gain") {
  const SpectralGrid g;
  const SpdSet spds = led_spds(LedSpdModel{}, g);
  const SpectralFunction r = responsivity(ResponsivityModel{}, g);
  const GnpCell red{"red", {{630.0, 60.0, 0.8, 0.8, 0.0, 1.0}}};
  const Eigen::Vector3d clear = gnp_gain_vector(GnpCell{}, spds, r, 0.0);
  const Eigen::Vector3d a = gnp_gain_vector(red, spds, r, 0.0);
  const Eigen::Vector3d b = gnp_gain_vector(red, spds, r, 45.0);
  CHECK(a[0] < b[0]);
  CHECK(b[0] < clear[0]);
  CHECK(a[0] / clear[0] < a[2] / clear[2]);
}

TEST_CASE("plate validation") {
  GnpPlate p = GnpPlate::transparent(3);
  CHECK_NOTHROW(p.validate(3));
  CHECK_THROWS_AS(p.validate(4), std::invalid_argument);
  p.led_to_cell[1] = 7;
  CHECK_THROWS_AS(p.validate(1), std::invalid_argument);
}
