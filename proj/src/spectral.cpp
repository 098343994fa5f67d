#include "vvlc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace vvlc {

SpectralGrid make_grid(double min_nm, double max_nm, double step_nm) {
  if (!(min_nm < max_nm)) throw std::invalid_argument("spectral grid: min must be below max");
  if (!(step_nm > 0.0)) throw std::invalid_argument("spectral grid: step must be positive");
  const double steps = (max_nm - min_nm) / step_nm;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
    std::ostringstream msg;
    msg << "spectral grid: span " << (max_nm - min_nm) << " nm is not a multiple of step " << step_nm
        << " nm";
    throw std::invalid_argument(msg.str());
  }
  return SpectralGrid(min_nm, max_nm, step_nm, static_cast<std::size_t>(rounded) + 1);
}

SpectralFunction::SpectralFunction(SpectralGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("spectral function: value count does not match grid");
}

SpectralFunction SpectralFunction::constant(const SpectralGrid& grid, double value) {
  return SpectralFunction(grid, std::vector<double>(grid.size(), value));
}

void require_same_grid(const SpectralFunction& a, const SpectralFunction& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("spectral functions on different grids");
}

SpectralFunction SpectralFunction::operator*(const SpectralFunction& other) const {
  require_same_grid(*this, other);
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] * other.values_[k];
  return SpectralFunction(grid_, std::move(v));
}

SpectralFunction SpectralFunction::operator+(const SpectralFunction& other) const {
  require_same_grid(*this, other);
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] + other.values_[k];
  return SpectralFunction(grid_, std::move(v));
}

SpectralFunction SpectralFunction::operator*(double s) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= s;
  return SpectralFunction(grid_, std::move(v));
}

double SpectralFunction::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double SpectralFunction::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double integrate(const SpectralFunction& f) {
  const auto v = f.values();
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) sum += v[k] + v[k + 1];
  return 0.5 * f.grid().step_nm() * sum;
}

double gaussian_profile(const LedPrimary& primary, double lambda_nm) {
  const double d = lambda_nm - primary.center_nm;
  return primary.peak * std::exp(-4.0 * std::numbers::ln2 * d * d / (primary.fwhm_nm * primary.fwhm_nm));
}

SpectralFunction gaussian_spd(const LedSpdModel& model, LedColor color, const SpectralGrid& grid) {
  const LedPrimary& primary = model[color];
  if (!(primary.fwhm_nm > 0.0)) throw std::invalid_argument("gaussian_spd: fwhm must be positive");
  if (!(primary.peak > 0.0)) throw std::invalid_argument("gaussian_spd: peak must be positive");
  auto raw = SpectralFunction::sample(grid, [&](double l) { return gaussian_profile(primary, l); });
  const double area = integrate(raw);
  if (!(area > 0.0)) throw std::invalid_argument("gaussian_spd: SPD vanishes on the grid");
  return raw * (1.0 / area);
}

SpdSet led_spds(const LedSpdModel& model, const SpectralGrid& grid) {
  return {gaussian_spd(model, LedColor::red, grid), gaussian_spd(model, LedColor::green, grid),
          gaussian_spd(model, LedColor::blue, grid)};
}

SpectralFunction responsivity(const ResponsivityModel& model, const SpectralGrid& grid) {
  if (!(model.end_nm > model.start_nm)) throw std::invalid_argument("responsivity: end must follow start");
  return SpectralFunction::sample(grid, [&](double l) {
    const double t = std::clamp((l - model.start_nm) / (model.end_nm - model.start_nm), 0.0, 1.0);
    return model.start_aw + t * (model.end_aw - model.start_aw);
  });
}

SpectralFunction reflectance(const ReflectanceModel& model, const SpectralGrid& grid) {
  return SpectralFunction::sample(grid, [&](double l) {
    return std::clamp(model.level + model.tilt_per_nm * (l - model.pivot_nm), 0.0, 1.0);
  });
}

double average_reflectance(const SpectralFunction& rho, const SpdSet& spds) {
  const SpectralFunction total = spds[0] + spds[1] + spds[2];
  require_same_grid(total, rho);
  const double den = integrate(total);
  if (!(den > 0.0)) throw std::invalid_argument("average_reflectance: total SPD is zero");
  return integrate(total * rho) / den;
}

SpectralFunction resample(std::span<const double> wavelengths_nm, std::span<const double> values,
                          const SpectralGrid& grid) {
  if (wavelengths_nm.size() != values.size() || wavelengths_nm.empty())
    throw std::invalid_argument("resample: need matching, non-empty sample arrays");
  if (!std::is_sorted(wavelengths_nm.begin(), wavelengths_nm.end()))
    throw std::invalid_argument("resample: wavelengths must be increasing");
  return SpectralFunction::sample(grid, [&](double l) {
    if (l <= wavelengths_nm.front()) return values.front();
    if (l >= wavelengths_nm.back()) return values.back();
    const auto hi = std::upper_bound(wavelengths_nm.begin(), wavelengths_nm.end(), l);
    const auto j = static_cast<std::size_t>(hi - wavelengths_nm.begin());
    const double x0 = wavelengths_nm[j - 1], x1 = wavelengths_nm[j];
    const double t = (l - x0) / (x1 - x0);
    return values[j - 1] + t * (values[j] - values[j - 1]);
  });
}

SpectralFunction load_spectral_csv(const std::filesystem::path& path, const SpectralGrid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spectral CSV: " + path.string());
  std::vector<double> xs, ys;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0, y = 0.0;
    if (!(row >> x >> y)) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("malformed spectral CSV row in " + path.string() + ": " + line);
    }
    first = false;
    xs.push_back(x);
    ys.push_back(y);
  }
  return resample(xs, ys, grid);
}

}  // namespace vvlc
