#include "vvlc/colorimetry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vvlc/cie1931.hpp"

namespace vvlc {

double distance(const Chromaticity& a, const Chromaticity& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Chromaticity chromaticity_of(const TriStimulus& t) {
  const double s = t.sum();
  if (!(s > 0.0)) throw std::domain_error("chromaticity_of: tri-stimulus sum is not positive");
  return {t.X / s, t.Y / s};
}

std::array<SpectralFunction, 3> color_matching_functions(const SpectralGrid& grid) {
  std::array<std::vector<double>, 3> v;
  for (auto& c : v) c.resize(grid.size(), 0.0);
  const double last = cie1931::kFirstNm + cie1931::kStepNm * (cie1931::kSampleCount - 1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double l = grid.wavelength(k);
    if (l < cie1931::kFirstNm - 1e-9 || l > last + 1e-9) continue;
    const double pos = std::clamp((l - cie1931::kFirstNm) / cie1931::kStepNm, 0.0,
                                  static_cast<double>(cie1931::kSampleCount - 1));
    const auto j = std::min(static_cast<std::size_t>(pos), cie1931::kSampleCount - 2);
    const double t = pos - static_cast<double>(j);
    for (std::size_t c = 0; c < 3; ++c) {
      v[c][k] = (1.0 - t) * cie1931::kColorMatching[j][c] + t * cie1931::kColorMatching[j + 1][c];
    }
  }
  return {SpectralFunction(grid, std::move(v[0])), SpectralFunction(grid, std::move(v[1])),
          SpectralFunction(grid, std::move(v[2]))};
}

TriStimulus tristimulus_of_spectrum(const SpectralFunction& f) {
  const auto cmf = color_matching_functions(f.grid());
  return {integrate(f * cmf[0]), integrate(f * cmf[1]), integrate(f * cmf[2])};
}

double planck_radiance(double lambda_nm, double kelvin) {
  if (!(kelvin > 0.0)) throw std::invalid_argument("planck: temperature must be positive");
  const double l = lambda_nm * 1e-9;
  const double hc = si::kPlanck * si::kSpeedOfLight;
  return 2.0 * hc * si::kSpeedOfLight / (std::pow(l, 5) * std::expm1(hc / (l * si::kBoltzmann * kelvin)));
}

SpectralFunction planck_spd(double kelvin, const SpectralGrid& grid) {
  if (!(kelvin > 0.0)) throw std::invalid_argument("planck_spd: temperature must be positive");
  auto raw = SpectralFunction::sample(grid, [&](double l) { return planck_radiance(l, kelvin); });
  return raw * (1.0 / integrate(raw));
}

Chromaticity white_point(double kelvin, const SpectralGrid& grid) {
  return chromaticity_of(tristimulus_of_spectrum(planck_spd(kelvin, grid)));
}

ColorMap build_color_map(std::span<const SpectralFunction> transmittance_per_led, const SpdSet& spds) {
  const auto leds = static_cast<Eigen::Index>(transmittance_per_led.size());
  if (leds == 0) throw std::invalid_argument("build_color_map: no LEDs");
  const auto cmf = color_matching_functions(spds[0].grid());
  ColorMap map{Eigen::VectorXd(3 * leds), Eigen::VectorXd(3 * leds), Eigen::VectorXd(3 * leds)};
  for (Eigen::Index m = 0; m < leds; ++m) {
    const SpectralFunction& a = transmittance_per_led[static_cast<std::size_t>(m)];
    for (std::size_t c = 0; c < 3; ++c) {
      const SpectralFunction filtered = spds[c] * a;
      const double X = integrate(filtered * cmf[0]);
      const double Y = integrate(filtered * cmf[1]);
      const double Z = integrate(filtered * cmf[2]);
      const auto idx = 3 * m + static_cast<Eigen::Index>(c);
      map.tx[idx] = X;
      map.ty[idx] = Y;
      map.tt[idx] = X + Y + Z;
    }
  }
  return map;
}

Chromaticity chromaticity_of_ratios(const ColorMap& map, const Eigen::VectorXd& p) {
  const double den = map.tt.dot(p);
  if (!(den > 0.0)) throw std::domain_error("chromaticity_of_ratios: zero tri-stimulus sum");
  return {map.tx.dot(p) / den, map.ty.dot(p) / den};
}

Eigen::MatrixXd strict_white_matrix(std::span<const ColorMap> receivers, const Chromaticity& target) {
  if (receivers.empty()) throw std::invalid_argument("strict_white_matrix: no receivers");
  const auto users = static_cast<Eigen::Index>(receivers.size());
  const Eigen::Index n = receivers.front().size();
  Eigen::MatrixXd tw(2 * users, n);
  for (Eigen::Index u = 0; u < users; ++u) {
    const ColorMap& m = receivers[static_cast<std::size_t>(u)];
    if (m.size() != n) throw std::invalid_argument("strict_white_matrix: receivers disagree on LED count");
    tw.row(u) = (m.tx - target.x * m.tt).transpose();
    tw.row(users + u) = (m.ty - target.y * m.tt).transpose();
  }
  return tw;
}

namespace {

double cross(const Chromaticity& o, const Chromaticity& a, const Chromaticity& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

QuadrangleConstraint QuadrangleConstraint::from_vertices(double kelvin,
                                                         const std::array<Chromaticity, 4>& vertices) {
  QuadrangleConstraint q;
  q.kelvin_ = kelvin;
  Chromaticity centre;
  for (const auto& v : vertices) {
    centre.x += 0.25 * v.x;
    centre.y += 0.25 * v.y;
  }
  q.vertices_ = vertices;
  std::sort(q.vertices_.begin(), q.vertices_.end(), [&](const Chromaticity& a, const Chromaticity& b) {
    return std::atan2(a.y - centre.y, a.x - centre.x) < std::atan2(b.y - centre.y, b.x - centre.x);
  });
  for (std::size_t k = 0; k < 4; ++k) {
    const Chromaticity& a = q.vertices_[k];
    const Chromaticity& b = q.vertices_[(k + 1) % 4];
    const Chromaticity& c = q.vertices_[(k + 2) % 4];
    if (!(cross(a, b, c) > 1e-12)) {
      std::ostringstream msg;
      msg << "quadrangle for " << kelvin << " K is degenerate or not convex";
      throw std::invalid_argument(msg.str());
    }
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len = std::hypot(ex, ey);
    // Interior lies to the left of a counter-clockwise edge.
    q.planes_[k] = {ey / len, -ex / len, (ex * a.y - ey * a.x) / len};
  }
  return q;
}

bool QuadrangleConstraint::contains(const Chromaticity& p, double tol) const {
  return std::all_of(planes_.begin(), planes_.end(), [&](const HalfPlane& h) { return h.evaluate(p) <= tol; });
}

void QuadrangleTable::insert(const QuadrangleConstraint& q) {
  table_.insert_or_assign(std::lround(q.kelvin()), q);
}

const QuadrangleConstraint& QuadrangleTable::at(double kelvin) const {
  const auto it = table_.find(std::lround(kelvin));
  if (it == table_.end()) {
    std::ostringstream msg;
    msg << "no chromaticity quadrangle for " << kelvin << " K";
    throw std::out_of_range(msg.str());
  }
  return it->second;
}

bool QuadrangleTable::contains(double kelvin) const { return table_.count(std::lround(kelvin)) > 0; }

std::vector<double> QuadrangleTable::temperatures() const {
  std::vector<double> out;
  for (const auto& [k, q] : table_) out.push_back(q.kelvin());
  return out;
}

QuadrangleTable QuadrangleTable::ansi_c78377() {
  struct Row {
    double kelvin;
    std::array<Chromaticity, 4> v;
  };
  static const Row rows[] = {
      {2700, {{{0.4813, 0.4319}, {0.4562, 0.4260}, {0.4373, 0.3893}, {0.4593, 0.3944}}}},
      {3000, {{{0.4562, 0.4260}, {0.4299, 0.4165}, {0.4147, 0.3814}, {0.4373, 0.3893}}}},
      {3500, {{{0.4299, 0.4165}, {0.3996, 0.4015}, {0.3889, 0.3690}, {0.4147, 0.3814}}}},
      {4000, {{{0.4006, 0.4044}, {0.3736, 0.3874}, {0.3670, 0.3578}, {0.3898, 0.3716}}}},
      {4500, {{{0.3736, 0.3874}, {0.3548, 0.3736}, {0.3512, 0.3465}, {0.3670, 0.3578}}}},
      {5000, {{{0.3551, 0.3760}, {0.3376, 0.3616}, {0.3366, 0.3369}, {0.3515, 0.3487}}}},
      {5700, {{{0.3376, 0.3616}, {0.3207, 0.3462}, {0.3222, 0.3243}, {0.3366, 0.3369}}}},
      {6500, {{{0.3205, 0.3481}, {0.3028, 0.3304}, {0.3068, 0.3113}, {0.3221, 0.3261}}}},
  };
  QuadrangleTable table;
  for (const Row& r : rows) table.insert(QuadrangleConstraint::from_vertices(r.kelvin, r.v));
  return table;
}

Eigen::MatrixXd quadrangle_rows(const QuadrangleConstraint& q, const ColorMap& map) {
  Eigen::MatrixXd rows(4, map.size());
  for (std::size_t b = 0; b < 4; ++b) {
    const HalfPlane& h = q.half_planes()[b];
    rows.row(static_cast<Eigen::Index>(b)) = (h.a * map.tx + h.b * map.ty + h.c * map.tt).transpose();
  }
  return rows;
}

Eigen::MatrixXd quadrangle_for(double kelvin, const QuadrangleTable& table, const ColorMap& map) {
  return quadrangle_rows(table.at(kelvin), map);
}

}  // namespace vvlc
