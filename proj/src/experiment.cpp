#include "vvlc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vvlc {

namespace {

constexpr double kNoAoKelvin = 4000.0;

/// Evaluates fn(0..n-1) on up to hardware_concurrency threads; results keep
/// their index so the output does not depend on scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        out[k] = fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

bool known(const std::vector<std::string>& names, std::string_view v) {
  return std::find(names.begin(), names.end(), v) != names.end();
}

std::vector<std::string> pick(const std::vector<std::string>& all, const std::string& only) {
  if (only.empty()) return all;
  if (!known(all, only)) throw std::invalid_argument("unknown variant: " + only);
  return {only};
}

Design from_ao(const AoSelection& sel) {
  return {sel.best.kelvin, sel.best.precoders, sel.best.ratios};
}

AoSelection run_ao(const ScenarioConfig& config, std::span<const HeadlightProblem> hl) {
  return ao_over_temperatures(hl, config.quadrangles, config.temperatures, config.optimizer);
}

double no_ao_kelvin(const ScenarioConfig& config) {
  if (std::find(config.temperatures.begin(), config.temperatures.end(), kNoAoKelvin) != config.temperatures.end())
    return kNoAoKelvin;
  return config.temperatures[config.temperatures.size() / 2];
}

Design strict_white_design(const ScenarioConfig& config, const Physics& physics,
                           std::span<const HeadlightProblem> hl) {
  Design d;
  d.kelvin = no_ao_kelvin(config);
  const Chromaticity target = white_point(d.kelvin, physics.grid);
  for (const HeadlightProblem& h : hl) {
    std::vector<ColorMap> maps;
    for (const LinkData& l : h.links) maps.push_back(l.color);
    const StrictWhiteResult init = init_ratios_strict(maps, target, config.optimizer.sca.qp);
    if (!init.feasible) throw std::runtime_error("strict white mix infeasible at the fixed temperature");
    d.precoders.push_back(design_precoders(h, init.p));
    d.ratios.push_back(init.p);
  }
  return d;
}

std::string fmt(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class Csv {
 public:
  Csv(const ScenarioConfig& config, std::initializer_list<std::string_view> header) {
    out_ << "# config_hash=" << hex_hash(config_hash(config)) << " seed=" << config.seed << '\n';
    row_of(header);
  }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  std::filesystem::path write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << out_.str();
    return path;
  }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& s) { return s; }

  void row_of(std::initializer_list<std::string_view> cells) {
    bool first = true;
    for (auto c : cells) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
  }

  std::ostringstream out_;
};

std::vector<Series> group(const std::vector<RatePoint>& pts) {
  std::vector<Series> s;
  for (const RatePoint& p : pts) {
    auto it = std::find_if(s.begin(), s.end(), [&](const Series& x) { return x.name == p.variant; });
    if (it == s.end()) {
      s.push_back({p.variant, {}});
      it = s.end() - 1;
    }
    it->points.emplace_back(p.ptx_dbm, p.value);
  }
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

const std::vector<std::string>& sumrate_variants() {
  static const std::vector<std::string> v = {"slnr_gnp_ao", "slnr_gnp_noao", "slnr_nognp", "mrt_gnp"};
  return v;
}

const std::vector<std::string>& secrecy_variants() {
  static const std::vector<std::string> v = {"slnr_gnp_ao", "slnr_nognp", "mrt_gnp"};
  return v;
}

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> v = {"sumrate", "secrecy", "ber-distance", "condnum", "chromaticity",
                                             "ao-trace"};
  return v;
}

Design design_variant(const ScenarioConfig& config, const Physics& physics, std::string_view variant, double ptx_w) {
  if (variant == "slnr_nognp") {
    const GnpPlate clear = GnpPlate::transparent(config.scene.leds_per_headlight);
    const auto hl = build_headlights(config, physics, clear, ptx_w, false);
    return from_ao(run_ao(config, hl));
  }
  const auto hl = build_headlights(config, physics, config.plate, ptx_w, false);
  if (variant == "slnr_gnp_ao") return from_ao(run_ao(config, hl));
  if (variant == "slnr_gnp_noao") return strict_white_design(config, physics, hl);
  if (variant == "mrt_gnp") {
    Design d = from_ao(run_ao(config, hl));
    for (std::size_t i = 0; i < hl.size(); ++i) d.precoders[i] = mrt_precoders(hl[i], d.ratios[i]);
    return d;
  }
  throw std::invalid_argument("unknown variant: " + std::string(variant));
}

Evaluation evaluate(const ScenarioConfig& config, const Physics& physics, const Design& design, bool include_nlos,
                    bool transparent_plate, double ptx_w) {
  const GnpPlate plate =
      transparent_plate ? GnpPlate::transparent(config.scene.leds_per_headlight) : config.plate;
  const auto hl = build_headlights(config, physics, plate, ptx_w, include_nlos);
  Evaluation e;
  e.served = config.served;
  e.alpha = config.radiometry.modulation_index;
  e.ptx_w = ptx_w;
  e.noise = config.noise;
  e.precoders = design.precoders;
  for (std::size_t i = 0; i < hl.size(); ++i) {
    std::vector<Eigen::MatrixXd> row;
    for (const LinkData& l : hl[i].links) row.push_back(l.effective(design.ratios[i]));
    e.channels.push_back(std::move(row));
  }
  return e;
}

std::vector<RatePoint> sumrate_sweep(const ScenarioConfig& config, bool include_nlos,
                                     const std::vector<std::string>& variants) {
  for (const auto& v : variants)
    if (!known(sumrate_variants(), v)) throw std::invalid_argument("unknown variant: " + v);
  const Physics physics = build_physics(config);
  const auto& powers = config.sweep.ptx_dbm;
  const std::size_t nv = variants.size();
  return parallel_map<RatePoint>(powers.size() * nv, [&](std::size_t k) {
    const double dbm = powers[k / nv];
    const std::string& v = variants[k % nv];
    const double p = dbm_to_watts(dbm);
    const Design d = design_variant(config, physics, v, p);
    const Evaluation e = evaluate(config, physics, d, include_nlos, v == "slnr_nognp", p);
    return RatePoint{dbm, v, sum_rate(e).sum, 0.0, 0.0, d.kelvin};
  });
}

std::vector<RatePoint> secrecy_sweep(const ScenarioConfig& config, bool include_nlos,
                                     const std::vector<std::string>& variants) {
  for (const auto& v : variants)
    if (!known(secrecy_variants(), v)) throw std::invalid_argument("unknown variant: " + v);
  const ScenarioConfig w = wiretap_view(config);
  const Physics physics = build_physics(w);
  const auto& powers = w.sweep.ptx_dbm;
  const std::size_t nv = variants.size();
  return parallel_map<RatePoint>(powers.size() * nv, [&](std::size_t k) {
    const double dbm = powers[k / nv];
    const std::string& v = variants[k % nv];
    const double p = dbm_to_watts(dbm);
    const Design d = design_variant(w, physics, v, p);
    const Evaluation e = evaluate(w, physics, d, include_nlos, v == "slnr_nognp", p);
    std::vector<Eigen::MatrixXd> bob, eve;
    std::vector<Eigen::VectorXd> f;
    for (std::size_t i = 0; i < e.channels.size(); ++i) {
      bob.push_back(e.channels[i][0]);
      eve.push_back(e.channels[i][1]);
      f.push_back(e.precoders[i][0]);
    }
    const double rb = link_rate(bob, f, w.noise, e.alpha, p);
    const double re = link_rate(eve, f, w.noise, e.alpha, p);
    return RatePoint{dbm, v, secrecy_rate(rb, re), rb, re, d.kelvin};
  });
}

std::vector<ConditionPoint> condition_sweep(const ScenarioConfig& config, std::span<const double> distances_m,
                                            bool include_nlos) {
  const Physics physics = build_physics(config);
  const double z = config.scene.receivers.front().z();
  const std::size_t nt = config.scene.leds_per_headlight;
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(3 * nt), 1.0 / 3.0);
  return parallel_map<ConditionPoint>(distances_m.size(), [&](std::size_t k) {
    ScenarioConfig c = config;
    c.scene.receivers = {Eigen::Vector3d(0.0, distances_m[k], z)};
    c.scene.reflector_overrides.clear();
    c.served = {0};
    const auto hl = build_headlights(c, physics, c.plate, 1.0, include_nlos);
    return ConditionPoint{distances_m[k], condition_number(hl.front().links.front().effective(p))};
  });
}

double ber_4pam_monte_carlo(double kappa, std::size_t symbols, std::uint64_t seed) {
  if (!(kappa > 0.0)) throw std::domain_error("ber_4pam_monte_carlo: κ must be positive");
  if (symbols == 0) throw std::invalid_argument("ber_4pam_monte_carlo: no symbols");
  static constexpr double level[4] = {-3.0, -1.0, 1.0, 3.0};
  static constexpr unsigned gray[4] = {0b00, 0b01, 0b11, 0b10};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_symbol(0, 3);
  std::normal_distribution<double> noise(0.0, 1.0 / kappa);
  std::size_t errors = 0;
  for (std::size_t n = 0; n < symbols; ++n) {
    const int s = pick_symbol(rng);
    const double r = level[s] + noise(rng);
    const int d = r < -2.0 ? 0 : r < 0.0 ? 1 : r < 2.0 ? 2 : 3;
    errors += static_cast<std::size_t>(std::popcount(gray[s] ^ gray[d]));
  }
  return static_cast<double>(errors) / (2.0 * static_cast<double>(symbols));
}

std::vector<DistancePoint> distance_sweep(const ScenarioConfig& config, bool include_nlos) {
  const Physics physics = build_physics(config);
  const std::size_t dr = config.sweep.distance_receiver;
  const std::size_t dh = config.sweep.distance_headlight;
  if (dh >= config.scene.headlight_count() || dr >= config.scene.receiver_count())
    throw std::invalid_argument("distance_sweep: receiver or headlight out of range");
  const auto served_it = std::find(config.served.begin(), config.served.end(), dr);
  if (served_it == config.served.end()) throw std::invalid_argument("distance_sweep: receiver is not served");
  const std::size_t k_served = static_cast<std::size_t>(served_it - config.served.begin());

  const Eigen::Vector3d ray = config.scene.receivers[dr] - config.scene.headlights[dh];
  LosGeometry geo;
  geo.order = config.radiometry.lambertian_order();
  geo.area_m2 = config.radiometry.pd_area_m2;
  geo.cos_emit = ray.y() / ray.norm();
  geo.cos_incidence = geo.cos_emit;

  const auto& targets = config.sweep.target_ber;
  std::vector<double> kappas, mc;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    kappas.push_back(kappa_for_ber(targets[t]));
    mc.push_back(ber_4pam_monte_carlo(kappas.back(), config.sweep.ber_symbols, config.seed + t));
  }

  const double p0 = dbm_to_watts(config.sweep.ao_ptx_dbm);
  const Design d = design_variant(config, physics, "slnr_gnp_ao", p0);
  const auto hl = build_headlights(config, physics, config.plate, p0, include_nlos);
  const LinkData& link = hl[dh].links[dr];
  const Eigen::VectorXd& ratios = d.ratios[dh];
  const auto& f = d.precoders[dh];
  const double shot = shot_noise_jensen(link.effective(ratios), f, config.noise, config.radiometry.modulation_index, p0);
  const double sigma2 = std::sqrt(config.noise.thermal_w + shot);
  const double norm = kappa_norm_term(link.gain, ratios, f[k_served], static_cast<std::size_t>(link.path_loss.rows()));

  std::vector<DistancePoint> out;
  for (double dbm : config.sweep.distance_ptx_dbm)
    for (std::size_t t = 0; t < targets.size(); ++t)
      out.push_back({dbm, targets[t], kappas[t], comm_distance(kappas[t], geo, dbm_to_watts(dbm), sigma2, norm), mc[t]});
  return out;
}

std::vector<ChromaticityPoint> chromaticity_points(const ScenarioConfig& config) {
  const Physics physics = build_physics(config);
  const double p = dbm_to_watts(config.sweep.ao_ptx_dbm);
  const auto hl = build_headlights(config, physics, config.plate, p, false);
  const Design d = from_ao(run_ao(config, hl));
  std::vector<ChromaticityPoint> out;
  for (std::size_t r = 0; r < config.scene.receiver_count(); ++r)
    for (std::size_t i = 0; i < hl.size(); ++i)
      out.push_back({r, i, d.kelvin, chromaticity_of_ratios(hl[i].links[r].color, d.ratios[i])});
  return out;
}

std::vector<AoTraceRow> ao_trace(const ScenarioConfig& config) {
  const Physics physics = build_physics(config);
  const auto hl = build_headlights(config, physics, config.plate, dbm_to_watts(config.sweep.ao_ptx_dbm), false);
  const AoSelection sel = run_ao(config, hl);
  std::vector<AoTraceRow> out;
  for (const AoResult& r : sel.per_temperature) out.insert(out.end(), r.trace.begin(), r.trace.end());
  return out;
}

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series, bool log_x, bool log_y) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : series)
    for (auto [x, y] : s.points) {
      if ((log_x && x <= 0) || (log_y && y <= 0)) continue;
      x0 = std::min(x0, tx(x)), x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y)), y1 = std::max(y1, ty(y));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title)
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  auto tick = [&](double v, bool lg) { return fmt(lg ? std::pow(10.0, v) : v); };
  o << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"11\">" << tick(x0, log_x) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" font-size=\"11\" text-anchor=\"end\">"
    << tick(x1, log_x) << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">" << tick(y0, log_y)
    << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" font-size=\"11\" text-anchor=\"end\">" << tick(y1, log_y)
    << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << xml_escape(x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << xml_escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % std::size(colors)];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (auto [x, y] : series[k].points) {
      if ((log_x && x <= 0) || (log_y && y <= 0)) continue;
      o << (first ? "" : " ") << fmt(px(x)) << ',' << fmt(py(y));
      first = false;
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (k + 1) << "\" font-size=\"11\" fill=\"" << c << "\">"
      << xml_escape(series[k].name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::filesystem::path> run_experiment(const ScenarioConfig& config, std::string_view command,
                                                  const ExperimentOptions& options) {
  if (!known(experiment_commands(), command)) throw std::invalid_argument("unknown command: " + std::string(command));
  config.validate();
  std::filesystem::create_directories(options.out_dir);
  const auto& dir = options.out_dir;
  std::vector<std::filesystem::path> written;
  auto svg = [&](const std::string& stem, const std::string& title, const std::string& xl, const std::string& yl,
                 const std::vector<Series>& s, bool lx = false, bool ly = false) {
    if (!options.svg) return;
    const auto path = dir / (stem + ".svg");
    write_text(path, render_svg(title, xl, yl, s, lx, ly));
    written.push_back(path);
  };

  if (command == "sumrate") {
    const auto pts = sumrate_sweep(config, options.include_nlos, pick(sumrate_variants(), options.variant));
    Csv csv(config, {"ptx_dbm", "variant", "sum_rate_bpshz"});
    for (const auto& p : pts) csv.row(p.ptx_dbm, p.variant, p.value);
    written.push_back(csv.write(dir / "sumrate.csv"));
    svg("sumrate", "Sum rate", "Tx power [dBm]", "sum rate [bit/s/Hz]", group(pts));
  } else if (command == "secrecy") {
    const auto pts = secrecy_sweep(config, options.include_nlos, pick(secrecy_variants(), options.variant));
    Csv csv(config, {"ptx_dbm", "variant", "secrecy_rate_bpshz", "bob_rate_bpshz", "eve_rate_bpshz"});
    for (const auto& p : pts) csv.row(p.ptx_dbm, p.variant, p.value, p.bob, p.eve);
    written.push_back(csv.write(dir / "secrecy.csv"));
    svg("secrecy", "Secrecy rate", "Tx power [dBm]", "secrecy rate [bit/s/Hz]", group(pts));
  } else if (command == "ber-distance") {
    const auto pts = distance_sweep(config, options.include_nlos);
    Csv csv(config, {"ptx_dbm", "target_ber", "kappa", "distance_m", "ber_monte_carlo"});
    std::vector<Series> s;
    for (const auto& p : pts) {
      csv.row(p.ptx_dbm, p.target_ber, p.kappa, p.distance_m, p.ber_monte_carlo);
      const std::string name = fmt(p.ptx_dbm) + " dBm";
      if (s.empty() || s.back().name != name) s.push_back({name, {}});
      s.back().points.emplace_back(p.target_ber, p.distance_m);
    }
    written.push_back(csv.write(dir / "ber_distance.csv"));
    svg("ber_distance", "Communication distance", "target BER", "distance [m]", s, true, false);
  } else if (command == "condnum") {
    const auto pts = condition_sweep(config, config.sweep.condnum_distances_m, options.include_nlos);
    Csv csv(config, {"distance_m", "condition_number"});
    Series s{"cond", {}};
    for (const auto& p : pts) {
      csv.row(p.distance_m, p.condition);
      s.points.emplace_back(p.distance_m, p.condition);
    }
    written.push_back(csv.write(dir / "condnum.csv"));
    svg("condnum", "Condition number", "distance [m]", "cond", {s}, false, true);
  } else if (command == "chromaticity") {
    const auto pts = chromaticity_points(config);
    Csv csv(config, {"u", "i", "K_selected", "x", "y"});
    for (const auto& p : pts) csv.row(p.receiver + 1, p.headlight + 1, p.kelvin, p.xy.x, p.xy.y);
    written.push_back(csv.write(dir / "chromaticity.csv"));
  } else {
    const auto rows = ao_trace(config);
    Csv csv(config, {"K", "outer", "sum_slnr", "inner_iterations"});
    std::map<double, Series> by_k;
    for (const auto& r : rows) {
      csv.row(r.kelvin, r.outer, r.sum_slnr, r.inner_iterations);
      auto& s = by_k[r.kelvin];
      s.name = fmt(r.kelvin) + " K";
      s.points.emplace_back(r.outer, r.sum_slnr);
    }
    written.push_back(csv.write(dir / "ao_trace.csv"));
    std::vector<Series> s;
    for (auto& [k, v] : by_k) s.push_back(std::move(v));
    svg("ao_trace", "Alternating optimization", "outer iteration", "sum SLNR", s);
  }
  return written;
}

}  // namespace vvlc
