#include <doctest.h>

#include <vector>

#include "vvlc/orchestrator.hpp"
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

}  // namespace

TEST_CASE("precoders are unit norm and improve on maximum ratio") {
  const auto& f = fixture();
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(12, 0.3);
  for (const auto& h : f.hl) {
    const auto slnr = design_precoders(h, p);
    const auto mrt = mrt_precoders(h, p);
    REQUIRE(slnr.size() == h.served.size());
    for (const auto& v : slnr) CHECK(v.norm() == doctest::Approx(1.0));
    for (const auto& v : mrt) CHECK(v.norm() == doctest::Approx(1.0));
    CHECK(sum_slnr(h, slnr, p) >= sum_slnr(h, mrt, p));
  }
}

TEST_CASE("alternating optimization is monotone and converges quickly") {
  const auto& f = fixture();
  for (double k : f.config.temperatures) {
    CAPTURE(k);
    const AoResult r = ao_for_temperature(f.hl, f.config.quadrangles.at(k), f.config.optimizer);
    REQUIRE(r.feasible);
    CHECK(r.converged);
    CHECK(r.outer_iterations <= 20);
    for (std::size_t t = 1; t < r.trace.size(); ++t) {
      CHECK(r.trace[t].before_sca >= r.trace[t - 1].sum_slnr - 1e-9 * r.trace[t - 1].sum_slnr);
      CHECK(r.trace[t].sum_slnr >= r.trace[t].before_sca - 1e-9 * r.trace[t].before_sca);
    }
    CHECK(r.sum_slnr == doctest::Approx(r.trace.back().sum_slnr));
    for (std::size_t i = 0; i < f.hl.size(); ++i) {
      const QpProblem set = ratio_feasible_set(f.hl[i], f.config.quadrangles.at(k));
      CHECK(set.violation(r.ratios[i]) <= 1e-9);
    }
  }
}

TEST_CASE("cool white wins on the red-weighted plate") {
  const auto& f = fixture();
  const AoSelection s = ao_over_temperatures(f.hl, f.config.quadrangles, f.config.temperatures, f.config.optimizer);
  CHECK(s.best.kelvin == 6500.0);
  CHECK(s.per_temperature.size() == f.config.temperatures.size());
  for (const auto& r : s.per_temperature) CHECK(r.sum_slnr <= s.best.sum_slnr);
}

TEST_CASE("infeasible temperature is reported, not thrown") {
  const auto& f = fixture();
  const QuadrangleConstraint far = QuadrangleConstraint::from_vertices(
      9999.0, {{{0.10, 0.80}, {0.12, 0.80}, {0.12, 0.82}, {0.10, 0.82}}});
  AoResult r;
  CHECK_NOTHROW(r = ao_for_temperature(f.hl, far, f.config.optimizer));
  CHECK_FALSE(r.feasible);
  CHECK_FALSE(r.diagnostic.empty());
  QuadrangleTable table;
  table.insert(far);
  const std::vector<double> ks = {9999.0};
  CHECK_THROWS_AS(ao_over_temperatures(f.hl, table, ks, f.config.optimizer), std::runtime_error);
}
