#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vvlc/spectral.hpp"

namespace vvlc {

struct TriStimulus {
  double X = 0.0;
  double Y = 0.0;
  double Z = 0.0;

  double sum() const { return X + Y + Z; }
};

struct Chromaticity {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Chromaticity& a, const Chromaticity& b);

/// (X, Y) / (X + Y + Z). Throws std::domain_error on a zero sum.
Chromaticity chromaticity_of(const TriStimulus& t);

/// x̄, ȳ, z̄ interpolated onto the grid (zero outside the tabulated 380-780 nm).
std::array<SpectralFunction, 3> color_matching_functions(const SpectralGrid& grid);

TriStimulus tristimulus_of_spectrum(const SpectralFunction& f);

namespace si {
inline constexpr double kPlanck = 6.62607015e-34;       // J s
inline constexpr double kSpeedOfLight = 2.99792458e8;   // m/s
inline constexpr double kBoltzmann = 1.380649e-23;      // J/K
inline constexpr double kElectronCharge = 1.602176634e-19;  // C
}  // namespace si

/// Black-body spectral radiance at wavelength λ (nm) and temperature K,
/// before any normalization.
double planck_radiance(double lambda_nm, double kelvin);

/// Black-body SPD on the grid, normalized to unit integral.
SpectralFunction planck_spd(double kelvin, const SpectralGrid& grid);

Chromaticity white_point(double kelvin, const SpectralGrid& grid = SpectralGrid{});

/// Tri-stimulus vectors of every primary of every LED as seen by one receiver
/// through one headlight. Entry 3m + c belongs to primary c of LED m.
struct ColorMap {
  Eigen::VectorXd tx;
  Eigen::VectorXd ty;
  Eigen::VectorXd tt;  // X + Y + Z

  Eigen::Index size() const { return tx.size(); }
};

/// Builds the tri-stimulus vectors from per-LED unpolarized transmittance
/// spectra (values in [0, 1]) and the three primary SPDs.
ColorMap build_color_map(std::span<const SpectralFunction> transmittance_per_led, const SpdSet& spds);

/// Chromaticity of the light mix p. Throws std::domain_error when ttᵀp is zero.
Chromaticity chromaticity_of_ratios(const ColorMap& map, const Eigen::VectorXd& p);

/// Stacks (tx - x_w tt)ᵀ for every receiver, then (ty - y_w tt)ᵀ: a 2U × 3N_t
/// matrix whose null space holds the mixes that hit the target exactly.
Eigen::MatrixXd strict_white_matrix(std::span<const ColorMap> receivers, const Chromaticity& target);

/// a x + b y + c <= 0, with (a, b) of unit length.
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double evaluate(const Chromaticity& p) const { return a * p.x + b * p.y + c; }
};

/// Chromaticity quadrangle around one nominal color temperature, stored as its
/// four vertices and the inward half-planes derived from them.
class QuadrangleConstraint {
 public:
  /// Vertices may come in any order; they are sorted counter-clockwise. Throws
  /// std::invalid_argument for a degenerate or non-convex quadrangle.
  static QuadrangleConstraint from_vertices(double kelvin, const std::array<Chromaticity, 4>& vertices);

  double kelvin() const { return kelvin_; }
  const std::array<Chromaticity, 4>& vertices() const { return vertices_; }
  const std::array<HalfPlane, 4>& half_planes() const { return planes_; }

  bool contains(const Chromaticity& p, double tol = 0.0) const;

 private:
  double kelvin_ = 0.0;
  std::array<Chromaticity, 4> vertices_{};
  std::array<HalfPlane, 4> planes_{};
};

/// Quadrangles keyed by color temperature in kelvin.
class QuadrangleTable {
 public:
  void insert(const QuadrangleConstraint& q);
  const QuadrangleConstraint& at(double kelvin) const;
  bool contains(double kelvin) const;
  std::vector<double> temperatures() const;

  /// Nominal CCT quadrangles of ANSI C78.377 for 2700 K ... 6500 K.
  static QuadrangleTable ansi_c78377();

 private:
  std::map<long, QuadrangleConstraint> table_;
};

/// 4 × 3N_t matrix with row β = a_β txᵀ + b_β tyᵀ + c_β ttᵀ, so that rows·p <= 0
/// exactly when the mix chromaticity lies inside the quadrangle.
Eigen::MatrixXd quadrangle_rows(const QuadrangleConstraint& q, const ColorMap& map);

/// Looks up K in the table; throws std::out_of_range for an unknown temperature.
Eigen::MatrixXd quadrangle_for(double kelvin, const QuadrangleTable& table, const ColorMap& map);

}  // namespace vvlc
