#include "vvlc/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vvlc/geometry.hpp"
#include "vvlc/precoder.hpp"

namespace vvlc {

std::vector<Eigen::VectorXd> design_precoders(const HeadlightProblem& problem, const Eigen::VectorXd& p) {
  problem.validate();
  const std::size_t nt = problem.led_count();
  std::vector<Eigen::MatrixXd> channels;
  for (const auto& l : problem.links) channels.push_back(l.effective(p));

  std::vector<Eigen::VectorXd> out;
  for (std::size_t r : problem.served) {
    std::vector<Eigen::MatrixXd> leaked;
    for (std::size_t v = 0; v < channels.size(); ++v)
      if (v != r) leaked.push_back(channels[v]);
    const auto n = static_cast<Eigen::Index>(nt);
    const Eigen::MatrixXd l =
        leaked.empty() ? Eigen::MatrixXd::Zero(n, n) : leakage_matrix(leaked, problem.alpha, problem.ptx_w);
    const double top = channels[r].cwiseAbs().maxCoeff() > 0.0 ? rank1_approx(channels[r]).eigenvalue : 0.0;
    const double shot = shot_noise_constant(top, nt, problem.served.size(), problem.alpha, problem.noise.gamma(),
                                            problem.ptx_w);
    out.push_back(solve_slnr(channels[r], l, shot + problem.noise.thermal_w, problem.alpha, problem.ptx_w).f);
  }
  return out;
}

std::vector<Eigen::VectorXd> mrt_precoders(const HeadlightProblem& problem, const Eigen::VectorXd& p) {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t r : problem.served) out.push_back(mrt_precoder(problem.links[r].effective(p)));
  return out;
}

namespace {

double total_sum_slnr(std::span<const HeadlightProblem> headlights, const PrecoderSet& f,
                      const std::vector<Eigen::VectorXd>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < headlights.size(); ++i) s += sum_slnr(headlights[i], f[i], p[i]);
  return s;
}

}  // namespace

AoResult ao_for_temperature(std::span<const HeadlightProblem> headlights, const QuadrangleConstraint& quadrangle,
                            const AoOptions& options) {
  if (headlights.empty()) throw std::invalid_argument("ao_for_temperature: no headlights");
  AoResult out;
  out.kelvin = quadrangle.kelvin();
  const Chromaticity target = white_point(quadrangle.kelvin());

  for (std::size_t i = 0; i < headlights.size(); ++i) {
    headlights[i].validate();
    std::vector<ColorMap> maps;
    for (const auto& l : headlights[i].links) maps.push_back(l.color);
    StrictWhiteResult init = init_ratios_strict(maps, target, options.sca.qp);
    if (!init.feasible) {
      std::ostringstream msg;
      msg << "no nonnegative mix reaches the " << quadrangle.kelvin() << " K white point at every receiver of headlight "
          << i;
      out.diagnostic = msg.str();
      out.initial.push_back(std::move(init));
      return out;
    }
    if (ratio_feasible_set(headlights[i], quadrangle).violation(init.p) > options.sca.qp.feasibility_tol) {
      std::ostringstream msg;
      msg << "the " << quadrangle.kelvin() << " K white mix of headlight " << i << " lies outside its quadrangle";
      out.diagnostic = msg.str();
      out.initial.push_back(std::move(init));
      return out;
    }
    out.ratios.push_back(init.p);
    out.initial.push_back(std::move(init));
  }
  out.feasible = true;
  out.precoders.resize(headlights.size());

  for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
    for (std::size_t i = 0; i < headlights.size(); ++i) {
      std::vector<Eigen::VectorXd> fresh = design_precoders(headlights[i], out.ratios[i]);
      if (outer > 0) {
        // The precoder step works with a looser shot-noise bound than the
        // objective; keep the previous precoders if it would lose ground.
        const double was = sum_slnr(headlights[i], out.precoders[i], out.ratios[i]);
        const double now = sum_slnr(headlights[i], fresh, out.ratios[i]);
        if (now < was) continue;
        for (std::size_t k = 0; k < fresh.size(); ++k)
          if (fresh[k].dot(out.precoders[i][k]) < 0.0) fresh[k] = -fresh[k];
      }
      out.precoders[i] = std::move(fresh);
    }

    AoTraceRow row;
    row.kelvin = quadrangle.kelvin();
    row.outer = outer + 1;
    row.before_sca = total_sum_slnr(headlights, out.precoders, out.ratios);
    for (std::size_t i = 0; i < headlights.size(); ++i) {
      const ScaResult sca = sca_loop(headlights[i], out.precoders[i], quadrangle, out.ratios[i], options.sca);
      out.ratios[i] = sca.p;
      row.inner_iterations += sca.iterations;
    }
    row.sum_slnr = total_sum_slnr(headlights, out.precoders, out.ratios);
    out.trace.push_back(row);
    out.outer_iterations = outer + 1;
    out.sum_slnr = row.sum_slnr;
    if (std::abs(row.sum_slnr - row.before_sca) <= options.epsilon * std::abs(row.sum_slnr)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

AoSelection ao_over_temperatures(std::span<const HeadlightProblem> headlights, const QuadrangleTable& table,
                                 std::span<const double> temperatures, const AoOptions& options) {
  if (temperatures.empty()) throw std::invalid_argument("ao_over_temperatures: no temperatures");
  AoSelection sel;
  const AoResult* best = nullptr;
  for (double k : temperatures) {
    if (!table.contains(k)) {
      AoResult skipped;
      skipped.kelvin = k;
      skipped.diagnostic = "no chromaticity quadrangle for this temperature";
      sel.per_temperature.push_back(std::move(skipped));
      continue;
    }
    sel.per_temperature.push_back(ao_for_temperature(headlights, table.at(k), options));
  }
  for (const auto& r : sel.per_temperature) {
    if (!r.feasible) continue;
    if (best == nullptr) {
      best = &r;
      continue;
    }
    const double tie = 1e-12 * std::max(std::abs(best->sum_slnr), std::abs(r.sum_slnr));
    if (r.sum_slnr > best->sum_slnr + tie || (std::abs(r.sum_slnr - best->sum_slnr) <= tie && r.kelvin > best->kelvin))
      best = &r;
  }
  if (best == nullptr) throw std::runtime_error("ao_over_temperatures: no feasible color temperature");
  sel.best = *best;
  return sel;
}

}  // namespace vvlc
