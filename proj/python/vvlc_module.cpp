#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vvlc/experiment.hpp"

namespace py = pybind11;
using namespace vvlc;

namespace {

py::list rate_rows(const std::vector<RatePoint>& pts, bool secrecy) {
  py::list out;
  for (const auto& p : pts) {
    py::dict d;
    d["ptx_dbm"] = p.ptx_dbm;
    d["variant"] = p.variant;
    d[secrecy ? "secrecy_rate" : "sum_rate"] = p.value;
    d["kelvin"] = p.kelvin;
    if (secrecy) d["bob_rate"] = p.bob, d["eve_rate"] = p.eve;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(vvlc, m) {
  m.doc() = "Vehicular VLC precoding with chiral nanoparticle plates";

  py::class_<ScenarioConfig>(m, "Scenario")
      .def_static(
          "defaults", [](const std::string& mode) { return ScenarioConfig::defaults(mode_from_string(mode)); },
          py::arg("mode") = "multiple_access")
      .def_static("from_json", [](const std::string& text) { return scenario_from_json(text); })
      .def_static("load", &load_scenario)
      .def("to_json", &scenario_to_json)
      .def("validate", &ScenarioConfig::validate)
      .def_property_readonly("hash", [](const ScenarioConfig& c) { return hex_hash(config_hash(c)); })
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("temperatures", &ScenarioConfig::temperatures)
      .def_property(
          "ptx_dbm", [](const ScenarioConfig& c) { return c.sweep.ptx_dbm; },
          [](ScenarioConfig& c, std::vector<double> v) { c.sweep.ptx_dbm = std::move(v); })
      .def_property_readonly("mode", [](const ScenarioConfig& c) { return to_string(c.mode); });

  m.def("commands", &experiment_commands);
  m.def("sumrate_variants", &sumrate_variants);
  m.def(
      "run_experiment",
      [](const ScenarioConfig& c, const std::string& command, const std::filesystem::path& out_dir, bool include_nlos,
         const std::string& variant, bool svg) {
        ExperimentOptions o;
        o.out_dir = out_dir;
        o.include_nlos = include_nlos;
        o.variant = variant;
        o.svg = svg;
        py::gil_scoped_release release;
        return run_experiment(c, command, o);
      },
      py::arg("scenario"), py::arg("command"), py::arg("out_dir"), py::arg("include_nlos") = true,
      py::arg("variant") = "", py::arg("svg") = false);
  m.def(
      "sumrate_sweep",
      [](const ScenarioConfig& c, bool include_nlos, std::optional<std::vector<std::string>> variants) {
        std::vector<RatePoint> pts;
        {
          py::gil_scoped_release release;
          pts = sumrate_sweep(c, include_nlos, variants.value_or(sumrate_variants()));
        }
        return rate_rows(pts, false);
      },
      py::arg("scenario"), py::arg("include_nlos") = true, py::arg("variants") = py::none());
  m.def(
      "secrecy_sweep",
      [](const ScenarioConfig& c, bool include_nlos, std::optional<std::vector<std::string>> variants) {
        std::vector<RatePoint> pts;
        {
          py::gil_scoped_release release;
          pts = secrecy_sweep(c, include_nlos, variants.value_or(secrecy_variants()));
        }
        return rate_rows(pts, true);
      },
      py::arg("scenario"), py::arg("include_nlos") = true, py::arg("variants") = py::none());
  m.def(
      "condition_sweep",
      [](const ScenarioConfig& c, const std::vector<double>& distances, bool include_nlos) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : condition_sweep(c, distances, include_nlos)) out.emplace_back(p.distance_m, p.condition);
        return out;
      },
      py::arg("scenario"), py::arg("distances_m"), py::arg("include_nlos") = true);

  m.def("dbm_to_watts", &dbm_to_watts);
  m.def("lambertian_order", py::overload_cast<double>(&lambertian_order), py::arg("half_power_deg"));
  m.def("white_point", [](double k) {
    const Chromaticity c = white_point(k);
    return std::make_pair(c.x, c.y);
  });
  m.def(
      "mueller_from_jones",
      [](double left, double right, double phase) { return Eigen::Matrix4d(mueller_from_jones({left, right, phase})); },
      py::arg("a_left"), py::arg("a_right"), py::arg("phase"));
  m.def(
      "solve_slnr",
      [](const Eigen::MatrixXd& h, const Eigen::MatrixXd& l, double reg, double alpha, double ptx) {
        const SlnrSolution s = solve_slnr(h, l, reg, alpha, ptx);
        return py::make_tuple(s.f, s.eigenvalue, s.slnr);
      },
      py::arg("channel"), py::arg("leakage"), py::arg("regularizer"), py::arg("alpha"), py::arg("ptx_w"));
  m.def("slnr_objective", &slnr_objective, py::arg("channel"), py::arg("leakage"), py::arg("regularizer"),
        py::arg("alpha"), py::arg("ptx_w"), py::arg("f"));
  m.def("ber_4pam", &ber_4pam);
  m.def("ber_4pam_exact", &ber_4pam_exact);
  m.def("kappa_for_ber", &kappa_for_ber);
  m.def("ber_4pam_monte_carlo", &ber_4pam_monte_carlo, py::arg("kappa"), py::arg("symbols"), py::arg("seed"));
}
