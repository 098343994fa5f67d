#include <doctest.h>

#include <vector>

#include "support.hpp"
#include "vvlc/orchestrator.hpp"
#include "vvlc/rgb_optimizer.hpp"
#include "vvlc/scenario.hpp"

using namespace vvlc;

namespace {

struct Fixture {
  ScenarioConfig config = ScenarioConfig::defaults();
  Physics physics = build_physics(config);
  std::vector<HeadlightProblem> hl = build_headlights(config, physics, config.plate, 1.0, false);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

std::vector<ColorMap> maps_of(const HeadlightProblem& h) {
  std::vector<ColorMap> m;
  for (const auto& l : h.links) m.push_back(l.color);
  return m;
}

}  // namespace

TEST_CASE("LED sum and precoder expansion") {
  const Eigen::MatrixXd s = led_sum_matrix(2);
  Eigen::MatrixXd expect(2, 6);
  expect << 1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1, 1;
  CHECK(s == expect);
  const Eigen::MatrixXd f = precoder_expansion(Eigen::Vector2d(2.0, -1.0));
  CHECK(f.diagonal().transpose() == (Eigen::VectorXd(6) << 2, 2, 2, -1, -1, -1).finished().transpose());
}

TEST_CASE("strict white on a single bare LED solves the two-equation system") {
  const SpectralGrid g;
  const SpdSet spds = led_spds(LedSpdModel{}, g);
  const std::vector<SpectralFunction> trans = {SpectralFunction::constant(g, 1.0)};
  const std::vector<ColorMap> maps = {build_color_map(trans, spds)};
  for (double k : {2700.0, 4000.0, 6500.0}) {
    const Chromaticity w = white_point(k);
    Eigen::Matrix3d a;
    a.row(0) = (maps[0].tx - w.x * maps[0].tt).transpose();
    a.row(1) = (maps[0].ty - w.y * maps[0].tt).transpose();
    a.row(2) = Eigen::RowVector3d::Ones();
    const Eigen::Vector3d ref = a.partialPivLu().solve(Eigen::Vector3d(0, 0, 1));
    const StrictWhiteResult r = init_ratios_strict(maps, w);
    REQUIRE(r.feasible);
    CHECK(r.residual <= 1e-9);
    CHECK((r.p - ref).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("strict white with GNPs meets the target at every receiver") {
  const auto& f = fixture();
  for (double k : f.config.temperatures) {
    const Chromaticity w = white_point(k, f.physics.grid);
    for (const auto& h : f.hl) {
      const StrictWhiteResult r = init_ratios_strict(maps_of(h), w);
      CAPTURE(k);
      REQUIRE(r.feasible);
      CHECK(r.p.minCoeff() >= -1e-12);
      CHECK((led_sum_matrix(h.led_count()) * r.p).maxCoeff() <= 1.0 + 1e-9);
      for (const auto& l : h.links) CHECK(distance(chromaticity_of_ratios(l.color, r.p), w) <= 1e-4);
    }
  }
}

TEST_CASE("unreachable target is reported infeasible") {
  const SpectralGrid g;
  const SpdSet spds = led_spds(LedSpdModel{}, g);
  const std::vector<SpectralFunction> trans = {SpectralFunction::constant(g, 1.0)};
  const std::vector<ColorMap> maps = {build_color_map(trans, spds)};
  const StrictWhiteResult r = init_ratios_strict(maps, {0.05, 0.9});
  CHECK_FALSE(r.feasible);
}

TEST_CASE("SLNR terms match the effective channels") {
  const auto& f = fixture();
  const HeadlightProblem& h = f.hl[0];
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(12, 0.3);
  const auto prec = design_precoders(h, p);
  const auto terms = slnr_terms_of_p(h, prec, p);
  const double a2p2 = h.alpha * h.alpha * h.ptx_w * h.ptx_w;
  for (std::size_t k = 0; k < h.served.size(); ++k) {
    const Eigen::MatrixXd hu = h.links[h.served[k]].effective(p);
    CHECK(terms[k].signal == doctest::Approx(a2p2 * (hu * prec[k]).squaredNorm()));
    double leak = 0.0;
    for (std::size_t r = 0; r < h.links.size(); ++r)
      if (r != h.served[k]) leak += a2p2 * (h.links[r].effective(p) * prec[k]).squaredNorm();
    CHECK(terms[k].leakage == doctest::Approx(leak));
    CHECK(terms[k].shot == doctest::Approx(shot_noise_jensen(hu, prec, h.noise, h.alpha, h.ptx_w)));
    const RatioForms forms = ratio_forms(h, prec, k);
    CHECK(a2p2 * p.dot(forms.signal * p) == doctest::Approx(terms[k].signal));
    CHECK(a2p2 * p.dot(forms.leakage * p) == doctest::Approx(terms[k].leakage));
  }
}

TEST_CASE("quadratic transform") {
  const double s = 4.0, l = 1.0, u = 0.5, th = 0.5;
  const double nu = optimal_nu(s, l, u, th);
  CHECK(quadratic_transform(s, l, u, th, nu) == doctest::Approx(s / (l + u + th)));
  for (double v : {0.0, 0.3, 1.0, 2.0}) CHECK(quadratic_transform(s, l, u, th, v) <= s / (l + u + th) + 1e-15);
}

TEST_CASE("linearizations match finite differences") {
  const auto& f = fixture();
  const HeadlightProblem& h = f.hl[1];
  Eigen::VectorXd p = test::random_matrix(12, 1, 0.1, 0.5);
  const auto prec = design_precoders(h, p);
  const RatioForms forms = ratio_forms(h, prec, 0);
  const Linearization lin = linearize(forms, p, h.alpha, h.ptx_w, h.noise.gamma());
  auto sqrt_signal = [&](const Eigen::VectorXd& q) { return h.alpha * h.ptx_w * std::sqrt(q.dot(forms.signal * q)); };
  auto shot = [&](const Eigen::VectorXd& q) { return h.noise.gamma() * h.ptx_w * std::sqrt(q.dot(forms.shot * q)); };
  CHECK(lin.sqrt_signal.value == doctest::Approx(sqrt_signal(p)));
  CHECK(lin.shot.value == doctest::Approx(shot(p)));
  for (Eigen::Index k = 0; k < 12; ++k) {
    const double step = 1e-6;
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(12, k) * step;
    CHECK(lin.sqrt_signal.gradient[k] ==
          doctest::Approx((sqrt_signal(p + e) - sqrt_signal(p - e)) / (2 * step)).epsilon(1e-5));
    CHECK(lin.shot.gradient[k] == doctest::Approx((shot(p + e) - shot(p - e)) / (2 * step)).epsilon(1e-5));
  }
  // √μ_S is convex, so its tangent is a global under-estimator.
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd q = test::random_matrix(12, 1, 0.0, 1.0);
    CHECK(lin.sqrt_signal(q) <= sqrt_signal(q) * (1 + 1e-12) + 1e-300);
  }
  CHECK_THROWS_AS(linearize(forms, Eigen::VectorXd::Zero(12), h.alpha, h.ptx_w, h.noise.gamma()), std::domain_error);
}

TEST_CASE("SCA is monotone and beats random feasible points") {
  const auto& f = fixture();
  const QuadrangleConstraint& q = f.config.quadrangles.at(6500.0);
  for (const auto& h : f.hl) {
    const StrictWhiteResult init = init_ratios_strict(maps_of(h), white_point(6500.0, f.physics.grid));
    REQUIRE(init.feasible);
    const auto prec = design_precoders(h, init.p);
    const ScaResult r = sca_loop(h, prec, q, init.p);
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
      CHECK(r.objective_trace[k] >= r.objective_trace[k - 1] - 1e-9 * std::abs(r.objective_trace[k - 1]));
    CHECK(r.converged);
    const QpProblem set = ratio_feasible_set(h, q);
    CHECK(set.violation(r.p) <= 1e-9);
    const double best = sum_slnr(h, prec, r.p);
    CHECK(best == doctest::Approx(r.objective_trace.back()));
    int tried = 0;
    // Local perturbations at several scales plus points on the segment back to the start.
    for (int t = 0; t < 200000 && tried < 300; ++t) {
      const double scale = std::pow(10.0, -1.0 - (t % 4));
      Eigen::VectorXd cand = r.p + scale * test::random_matrix(12, 1);
      if (t % 5 == 0) cand = init.p + test::uniform(0.0, 1.0) * (r.p - init.p);
      if (set.violation(cand) > 0.0) continue;
      ++tried;
      CHECK(sum_slnr(h, prec, cand) <= best * (1 + 1e-6));
    }
    CHECK(tried > 50);
  }
}

TEST_CASE("SCA rejects an infeasible start") {
  const auto& f = fixture();
  const auto& h = f.hl[0];
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(12, 0.3);
  const auto prec = design_precoders(h, p);
  CHECK_THROWS_AS(sca_loop(h, prec, f.config.quadrangles.at(2700.0), Eigen::VectorXd::Constant(12, 5.0)),
                  std::invalid_argument);
}
