#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace vvlc {

/// Uniform wavelength grid in nanometres, both endpoints included.
class SpectralGrid {
 public:
  SpectralGrid() = default;

  double min_nm() const { return min_nm_; }
  double max_nm() const { return max_nm_; }
  double step_nm() const { return step_nm_; }
  std::size_t size() const { return count_; }
  double wavelength(std::size_t k) const { return min_nm_ + step_nm_ * static_cast<double>(k); }

  bool operator==(const SpectralGrid&) const = default;

 private:
  friend SpectralGrid make_grid(double, double, double);
  SpectralGrid(double min_nm, double max_nm, double step_nm, std::size_t count)
      : min_nm_(min_nm), max_nm_(max_nm), step_nm_(step_nm), count_(count) {}

  double min_nm_ = 380.0;
  double max_nm_ = 780.0;
  double step_nm_ = 5.0;
  std::size_t count_ = 81;
};

/// Throws std::invalid_argument unless min < max, step > 0 and the span is an
/// integral number of steps (relative tolerance 1e-9).
SpectralGrid make_grid(double min_nm, double max_nm, double step_nm);

/// Wavelength-sampled function on a SpectralGrid.
class SpectralFunction {
 public:
  SpectralFunction() = default;
  SpectralFunction(SpectralGrid grid, std::vector<double> values);

  static SpectralFunction constant(const SpectralGrid& grid, double value);

  template <typename F>
  static SpectralFunction sample(const SpectralGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.wavelength(k));
    return SpectralFunction(grid, std::move(v));
  }

  const SpectralGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  SpectralFunction operator*(const SpectralFunction& other) const;
  SpectralFunction operator+(const SpectralFunction& other) const;
  SpectralFunction operator*(double s) const;

  double min_value() const;
  double max_value() const;

 private:
  SpectralGrid grid_;
  std::vector<double> values_;
};

/// Trapezoidal rule over the function's grid.
double integrate(const SpectralFunction& f);

/// Throws std::invalid_argument when the two functions live on different grids.
void require_same_grid(const SpectralFunction& a, const SpectralFunction& b);

enum class LedColor : std::size_t { red = 0, green = 1, blue = 2 };
inline constexpr std::array<LedColor, 3> kLedColors = {LedColor::red, LedColor::green,
                                                       LedColor::blue};

struct LedPrimary {
  double center_nm;
  double fwhm_nm;
  double peak;
};

/// Red, green and blue primaries of one RGB LED. Gaussian SPD per primary.
struct LedSpdModel {
  std::array<LedPrimary, 3> primaries = {{{630.0, 25.0, 1.0}, {521.0, 25.0, 1.0}, {450.0, 25.0, 1.0}}};

  const LedPrimary& operator[](LedColor c) const { return primaries[static_cast<std::size_t>(c)]; }
};

/// Un-normalized Gaussian: peak * exp(-4 ln2 (λ - center)² / fwhm²).
double gaussian_profile(const LedPrimary& primary, double lambda_nm);

/// Gaussian SPD sampled on the grid and scaled to unit trapezoidal integral.
SpectralFunction gaussian_spd(const LedSpdModel& model, LedColor color, const SpectralGrid& grid);

using SpdSet = std::array<SpectralFunction, 3>;

SpdSet led_spds(const LedSpdModel& model, const SpectralGrid& grid);

/// Photodiode responsivity in A/W, linear between two anchor points and held
/// constant outside them.
struct ResponsivityModel {
  double start_nm = 380.0;
  double start_aw = 0.1;
  double end_nm = 780.0;
  double end_aw = 0.5;
};

SpectralFunction responsivity(const ResponsivityModel& model, const SpectralGrid& grid);

/// Reflectance level + tilt_per_nm * (λ - pivot_nm), clamped to [0, 1].
struct ReflectanceModel {
  double level = 0.91;
  double tilt_per_nm = 0.0;
  double pivot_nm = 580.0;
};

SpectralFunction reflectance(const ReflectanceModel& model, const SpectralGrid& grid);

/// ∫ S ρ / ∫ S with S the sum of the three primaries.
double average_reflectance(const SpectralFunction& rho, const SpdSet& spds);

/// Linear interpolation of (x, y) samples onto the grid. Outside the sampled
/// range the nearest endpoint value is held.
SpectralFunction resample(std::span<const double> wavelengths_nm, std::span<const double> values,
                          const SpectralGrid& grid);

/// Reads a two-column CSV (wavelength_nm, value); a non-numeric first line is
/// treated as a header.
SpectralFunction load_spectral_csv(const std::filesystem::path& path, const SpectralGrid& grid);

}  // namespace vvlc
