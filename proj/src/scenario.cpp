#include "vvlc/scenario.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vvlc {

using json = nlohmann::ordered_json;

std::string to_string(Mode m) { return m == Mode::wiretap ? "wiretap" : "multiple_access"; }

Mode mode_from_string(std::string_view s) {
  if (s == "multiple_access") return Mode::multiple_access;
  if (s == "wiretap") return Mode::wiretap;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

GnpPlate default_plate() {
  // A broad, nearly isotropic red band carries most of the absorption; a
  // shallower blue-green band with a strong azimuth dependence separates the
  // receivers.
  const double phase[4] = {-35.0, -5.0, 25.0, 55.0};
  const double red_center[4] = {635.0, 620.0, 645.0, 628.0};
  GnpPlate plate;
  for (int k = 0; k < 4; ++k) {
    const double twist = k % 2 == 0 ? -0.05 : 0.05;
    GnpCell cell;
    cell.id = std::string("cell-") + static_cast<char>('a' + k);
    cell.resonances.push_back({red_center[k], 80.0, 1.6 * (1.0 + twist), 1.6 * (1.0 - twist), phase[k], 0.1});
    cell.resonances.push_back({465.0 + 10.0 * k, 100.0, 0.63, 0.57, phase[k], 1.0});
    plate.cells.push_back(std::move(cell));
    plate.led_to_cell.push_back(static_cast<std::size_t>(k));
  }
  return plate;
}

ScenarioConfig ScenarioConfig::defaults(Mode mode) {
  ScenarioConfig c;
  c.mode = mode;
  c.plate = default_plate();
  c.temperatures = {2700, 3000, 3500, 4000, 4500, 5000, 5700, 6500};
  c.quadrangles = QuadrangleTable::ansi_c78377();
  for (int d = 0; d <= 60; d += 5) c.sweep.ptx_dbm.push_back(d);
  for (int r = 5; r <= 100; r += 5) c.sweep.condnum_distances_m.push_back(r);
  if (mode == Mode::wiretap) {
    c.scene.receivers = {{-3.0, 20.0, 0.9}, {0.0, 23.0, 0.9}};
    c.served = {0};
    c.sweep.distance_receiver = 0;
  } else {
    c.served = {0, 1, 2};
  }
  return c;
}

void ScenarioConfig::validate() const {
  scene.validate();
  radiometry.validate();
  noise.validate();
  if (plate.led_count() != scene.leds_per_headlight)
    throw std::invalid_argument("scenario: plate must map every LED of a headlight");
  plate.validate(served.size());
  if (served.empty()) throw std::invalid_argument("scenario: no served receivers");
  std::set<std::size_t> seen;
  for (std::size_t s : served) {
    if (s >= scene.receiver_count()) throw std::invalid_argument("scenario: served receiver out of range");
    if (!seen.insert(s).second) throw std::invalid_argument("scenario: duplicate served receiver");
  }
  if (mode == Mode::wiretap && (served.size() != 1 || scene.receiver_count() != 2))
    throw std::invalid_argument("scenario: wiretap mode needs one served and one eavesdropping receiver");
  if (temperatures.empty()) throw std::invalid_argument("scenario: empty temperature set");
  for (double k : temperatures)
    if (!quadrangles.contains(k)) throw std::invalid_argument("scenario: temperature without a quadrangle");
  if (sweep.ptx_dbm.empty()) throw std::invalid_argument("scenario: empty transmit-power grid");
  if (sweep.distance_receiver >= scene.receiver_count() || sweep.distance_headlight >= scene.headlight_count())
    throw std::invalid_argument("scenario: distance link out of range");
  for (double b : sweep.target_ber)
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("scenario: target BER outside (0, 1)");
  if (!(optimizer.epsilon > 0.0) || optimizer.max_outer_iterations < 1 || !(optimizer.sca.epsilon > 0.0) ||
      optimizer.sca.max_iterations < 1)
    throw std::invalid_argument("scenario: optimizer settings must be positive");
  (void)make_grid(spectral.min_nm, spectral.max_nm, spectral.step_nm);
}

namespace {

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Reads known keys into existing values and rejects anything else.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw std::invalid_argument(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (j_.contains(key)) out = j_.at(key).template get<T>();
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw std::invalid_argument(where_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json led_primary(const LedPrimary& p) { return {{"center_nm", p.center_nm}, {"fwhm_nm", p.fwhm_nm}, {"peak", p.peak}}; }

json resonance(const Resonance& r) {
  return {{"center_nm", r.center_nm},          {"width_nm", r.width_nm},
          {"depth_left", r.depth_left},        {"depth_right", r.depth_right},
          {"azimuth_phase_deg", r.azimuth_phase_deg}, {"azimuth_sensitivity", r.azimuth_sensitivity}};
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  j["served"] = c.served;

  json scene;
  scene["headlights"] = json::array();
  for (const auto& h : c.scene.headlights) scene["headlights"].push_back(vec3(h));
  scene["leds_per_headlight"] = c.scene.leds_per_headlight;
  scene["led_spacing_m"] = c.scene.led_spacing_m;
  scene["receivers"] = json::array();
  for (const auto& r : c.scene.receivers) scene["receivers"].push_back(vec3(r));
  scene["pds_per_receiver"] = c.scene.pds_per_receiver;
  scene["pd_spacing_m"] = c.scene.pd_spacing_m;
  scene["reflector_height_m"] = c.scene.reflector_height_m;
  scene["reflector_overrides"] = json::array();
  for (const auto& o : c.scene.reflector_overrides) scene["reflector_overrides"].push_back(o ? vec3(*o) : json());
  j["scene"] = scene;

  j["radiometry"] = {{"half_power_deg", c.radiometry.half_power_deg},
                     {"pd_area_m2", c.radiometry.pd_area_m2},
                     {"reflector_area_m2", c.radiometry.reflector_area_m2},
                     {"efficiency_w_per_a", c.radiometry.efficiency_w_per_a},
                     {"modulation_index", c.radiometry.modulation_index}};
  j["noise"] = {{"thermal_w", c.noise.thermal_w},
                {"electron_charge", c.noise.electron_charge},
                {"bandwidth_hz", c.noise.bandwidth_hz}};

  json spectral;
  spectral["min_nm"] = c.spectral.min_nm;
  spectral["max_nm"] = c.spectral.max_nm;
  spectral["step_nm"] = c.spectral.step_nm;
  spectral["leds"] = json::array();
  for (const auto& p : c.spectral.leds.primaries) spectral["leds"].push_back(led_primary(p));
  spectral["responsivity"] = {{"start_nm", c.spectral.responsivity.start_nm},
                              {"start_aw", c.spectral.responsivity.start_aw},
                              {"end_nm", c.spectral.responsivity.end_nm},
                              {"end_aw", c.spectral.responsivity.end_aw}};
  spectral["reflectance"] = {{"level", c.spectral.reflectance.level},
                             {"tilt_per_nm", c.spectral.reflectance.tilt_per_nm},
                             {"pivot_nm", c.spectral.reflectance.pivot_nm}};
  j["spectral"] = spectral;

  json plate;
  plate["cells"] = json::array();
  for (const auto& cell : c.plate.cells) {
    json rs = json::array();
    for (const auto& r : cell.resonances) rs.push_back(resonance(r));
    plate["cells"].push_back({{"id", cell.id}, {"resonances", rs}});
  }
  plate["led_to_cell"] = c.plate.led_to_cell;
  j["plate"] = plate;

  j["temperatures"] = c.temperatures;
  j["quadrangles"] = json::array();
  for (double k : c.quadrangles.temperatures()) {
    const auto& q = c.quadrangles.at(k);
    json v = json::array();
    for (const auto& p : q.vertices()) v.push_back(json::array({p.x, p.y}));
    j["quadrangles"].push_back({{"kelvin", k}, {"vertices", v}});
  }

  const auto& o = c.optimizer;
  j["optimizer"] = {{"epsilon", o.epsilon},
                    {"max_outer_iterations", o.max_outer_iterations},
                    {"sca",
                     {{"epsilon", o.sca.epsilon},
                      {"max_iterations", o.sca.max_iterations},
                      {"refresh_nu_each_iteration", o.sca.refresh_nu_each_iteration}}},
                    {"qp",
                     {{"max_iterations", o.sca.qp.max_iterations},
                      {"feasibility_tol", o.sca.qp.feasibility_tol},
                      {"optimality_tol", o.sca.qp.optimality_tol},
                      {"psd_tol", o.sca.qp.psd_tol}}}};

  const auto& s = c.sweep;
  j["sweep"] = {{"ptx_dbm", s.ptx_dbm},
                {"ao_ptx_dbm", s.ao_ptx_dbm},
                {"distance_ptx_dbm", s.distance_ptx_dbm},
                {"target_ber", s.target_ber},
                {"condnum_distances_m", s.condnum_distances_m},
                {"distance_receiver", s.distance_receiver},
                {"distance_headlight", s.distance_headlight},
                {"ber_symbols", s.ber_symbols}};
  return j;
}

std::vector<Eigen::Vector3d> points(const json& j) {
  std::vector<Eigen::Vector3d> out;
  for (const auto& p : j) out.push_back(vec3(p));
  return out;
}

ScenarioConfig from_json(const json& j) {
  Reader top(j, "scenario");
  std::string mode = "multiple_access";
  top.get("mode", mode);
  ScenarioConfig c = ScenarioConfig::defaults(mode_from_string(mode));
  top.get("seed", c.seed);
  top.get("served", c.served);

  if (const json* s = top.sub("scene")) {
    Reader r(*s, "scene");
    if (const json* h = r.sub("headlights")) c.scene.headlights = points(*h);
    r.get("leds_per_headlight", c.scene.leds_per_headlight);
    r.get("led_spacing_m", c.scene.led_spacing_m);
    if (const json* rx = r.sub("receivers")) c.scene.receivers = points(*rx);
    r.get("pds_per_receiver", c.scene.pds_per_receiver);
    r.get("pd_spacing_m", c.scene.pd_spacing_m);
    r.get("reflector_height_m", c.scene.reflector_height_m);
    if (const json* o = r.sub("reflector_overrides")) {
      c.scene.reflector_overrides.clear();
      for (const auto& e : *o)
        c.scene.reflector_overrides.push_back(e.is_null() ? std::nullopt : std::optional<Eigen::Vector3d>(vec3(e)));
    }
    r.finish();
  }
  if (const json* s = top.sub("radiometry")) {
    Reader r(*s, "radiometry");
    r.get("half_power_deg", c.radiometry.half_power_deg);
    r.get("pd_area_m2", c.radiometry.pd_area_m2);
    r.get("reflector_area_m2", c.radiometry.reflector_area_m2);
    r.get("efficiency_w_per_a", c.radiometry.efficiency_w_per_a);
    r.get("modulation_index", c.radiometry.modulation_index);
    r.finish();
  }
  if (const json* s = top.sub("noise")) {
    Reader r(*s, "noise");
    double dbm = 0.0;
    if (const json* d = r.sub("thermal_dbm")) {
      dbm = d->get<double>();
      c.noise.thermal_w = dbm_to_watts(dbm);
    }
    r.get("thermal_w", c.noise.thermal_w);
    r.get("electron_charge", c.noise.electron_charge);
    r.get("bandwidth_hz", c.noise.bandwidth_hz);
    r.finish();
  }
  if (const json* s = top.sub("spectral")) {
    Reader r(*s, "spectral");
    r.get("min_nm", c.spectral.min_nm);
    r.get("max_nm", c.spectral.max_nm);
    r.get("step_nm", c.spectral.step_nm);
    if (const json* leds = r.sub("leds")) {
      if (!leds->is_array() || leds->size() != 3) throw std::invalid_argument("spectral.leds: need three primaries");
      for (std::size_t k = 0; k < 3; ++k) {
        Reader lr((*leds)[k], "spectral.leds");
        auto& p = c.spectral.leds.primaries[k];
        lr.get("center_nm", p.center_nm);
        lr.get("fwhm_nm", p.fwhm_nm);
        lr.get("peak", p.peak);
        lr.finish();
      }
    }
    if (const json* rs = r.sub("responsivity")) {
      Reader rr(*rs, "spectral.responsivity");
      rr.get("start_nm", c.spectral.responsivity.start_nm);
      rr.get("start_aw", c.spectral.responsivity.start_aw);
      rr.get("end_nm", c.spectral.responsivity.end_nm);
      rr.get("end_aw", c.spectral.responsivity.end_aw);
      rr.finish();
    }
    if (const json* rf = r.sub("reflectance")) {
      Reader rr(*rf, "spectral.reflectance");
      rr.get("level", c.spectral.reflectance.level);
      rr.get("tilt_per_nm", c.spectral.reflectance.tilt_per_nm);
      rr.get("pivot_nm", c.spectral.reflectance.pivot_nm);
      rr.finish();
    }
    r.finish();
  }
  if (const json* s = top.sub("plate")) {
    Reader r(*s, "plate");
    if (const json* cells = r.sub("cells")) {
      c.plate.cells.clear();
      for (const auto& cj : *cells) {
        Reader cr(cj, "plate.cells");
        GnpCell cell;
        cr.get("id", cell.id);
        if (const json* rs = cr.sub("resonances")) {
          for (const auto& rj : *rs) {
            Reader rr(rj, "plate.cells.resonances");
            Resonance res;
            rr.get("center_nm", res.center_nm);
            rr.get("width_nm", res.width_nm);
            rr.get("depth_left", res.depth_left);
            rr.get("depth_right", res.depth_right);
            rr.get("azimuth_phase_deg", res.azimuth_phase_deg);
            rr.get("azimuth_sensitivity", res.azimuth_sensitivity);
            rr.finish();
            cell.resonances.push_back(res);
          }
        }
        cr.finish();
        c.plate.cells.push_back(std::move(cell));
      }
    }
    r.get("led_to_cell", c.plate.led_to_cell);
    r.finish();
  }
  top.get("temperatures", c.temperatures);
  if (const json* qs = top.sub("quadrangles")) {
    QuadrangleTable table;
    for (const auto& qj : *qs) {
      Reader qr(qj, "quadrangles");
      double kelvin = 0.0;
      qr.get("kelvin", kelvin);
      const json* v = qr.sub("vertices");
      if (v == nullptr || !v->is_array() || v->size() != 4)
        throw std::invalid_argument("quadrangles: need four vertices");
      std::array<Chromaticity, 4> vs;
      for (std::size_t k = 0; k < 4; ++k) vs[k] = {(*v)[k].at(0).get<double>(), (*v)[k].at(1).get<double>()};
      qr.finish();
      table.insert(QuadrangleConstraint::from_vertices(kelvin, vs));
    }
    c.quadrangles = table;
  }
  if (const json* s = top.sub("optimizer")) {
    Reader r(*s, "optimizer");
    r.get("epsilon", c.optimizer.epsilon);
    r.get("max_outer_iterations", c.optimizer.max_outer_iterations);
    if (const json* sca = r.sub("sca")) {
      Reader sr(*sca, "optimizer.sca");
      sr.get("epsilon", c.optimizer.sca.epsilon);
      sr.get("max_iterations", c.optimizer.sca.max_iterations);
      sr.get("refresh_nu_each_iteration", c.optimizer.sca.refresh_nu_each_iteration);
      sr.finish();
    }
    if (const json* qp = r.sub("qp")) {
      Reader qr(*qp, "optimizer.qp");
      qr.get("max_iterations", c.optimizer.sca.qp.max_iterations);
      qr.get("feasibility_tol", c.optimizer.sca.qp.feasibility_tol);
      qr.get("optimality_tol", c.optimizer.sca.qp.optimality_tol);
      qr.get("psd_tol", c.optimizer.sca.qp.psd_tol);
      qr.finish();
    }
    r.finish();
  }
  if (const json* s = top.sub("sweep")) {
    Reader r(*s, "sweep");
    r.get("ptx_dbm", c.sweep.ptx_dbm);
    r.get("ao_ptx_dbm", c.sweep.ao_ptx_dbm);
    r.get("distance_ptx_dbm", c.sweep.distance_ptx_dbm);
    r.get("target_ber", c.sweep.target_ber);
    r.get("condnum_distances_m", c.sweep.condnum_distances_m);
    r.get("distance_receiver", c.sweep.distance_receiver);
    r.get("distance_headlight", c.sweep.distance_headlight);
    r.get("ber_symbols", c.sweep.ber_symbols);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

ScenarioConfig scenario_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: malformed JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

std::uint64_t config_hash(const ScenarioConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_hash(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

Physics build_physics(const ScenarioConfig& config) {
  Physics ph;
  ph.grid = make_grid(config.spectral.min_nm, config.spectral.max_nm, config.spectral.step_nm);
  ph.spds = led_spds(config.spectral.leds, ph.grid);
  ph.responsivity = responsivity(config.spectral.responsivity, ph.grid);
  ph.mean_reflectance = average_reflectance(reflectance(config.spectral.reflectance, ph.grid), ph.spds);
  return ph;
}

std::vector<HeadlightProblem> build_headlights(const ScenarioConfig& config, const Physics& physics,
                                               const GnpPlate& plate, double ptx_w, bool include_nlos) {
  std::vector<HeadlightProblem> out;
  for (std::size_t i = 0; i < config.scene.headlight_count(); ++i) {
    HeadlightProblem hp;
    hp.served = config.served;
    hp.alpha = config.radiometry.modulation_index;
    hp.ptx_w = ptx_w;
    hp.noise = config.noise;
    for (std::size_t r = 0; r < config.scene.receiver_count(); ++r) {
      LinkData link;
      link.path_loss =
          path_loss_matrix(config.scene, config.radiometry, r, i, physics.mean_reflectance).combined(include_nlos);
      const std::vector<double> az = led_azimuths(config.scene, r, i);
      link.gain = gain_matrix(plate, physics.spds, physics.responsivity, az);
      std::vector<SpectralFunction> trans;
      for (std::size_t m = 0; m < plate.led_count(); ++m)
        trans.push_back(cell_transmittance(plate.cell_for_led(m), physics.grid, az[m]));
      link.color = build_color_map(trans, physics.spds);
      hp.links.push_back(std::move(link));
    }
    out.push_back(std::move(hp));
  }
  return out;
}

ScenarioConfig wiretap_view(const ScenarioConfig& config) {
  if (config.mode == Mode::wiretap) return config;
  if (config.scene.receiver_count() < 2) throw std::invalid_argument("wiretap_view: need two receivers");
  ScenarioConfig w = config;
  w.mode = Mode::wiretap;
  w.scene.receivers = {config.scene.receivers[0], config.scene.receivers[1]};
  if (w.scene.reflector_overrides.size() > 2) w.scene.reflector_overrides.resize(2);
  w.served = {0};
  w.sweep.distance_receiver = 0;
  return w;
}

}  // namespace vvlc
