#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "felod/geometry.hpp"
#include "felod/mesh.hpp"

namespace felod {

enum class PeriodicFormula {
  Oscillating,  ///< (2+1.8 sin(2πx/ε))/(2+1.8 cos(2πy/ε)) + (2+1.8 sin(2πy/ε))/(2+1.8 sin(2πx/ε))
  WellProduct,  ///< 1/((2+1.5 sin(2πx/ε))(2+1.5 sin(2πy/ε)))
};

struct AnalyticPeriodic {
  PeriodicFormula formula = PeriodicFormula::Oscillating;
  double epsilon = 0.2;
};

/// Piecewise-constant field on an n x n grid over the unit square, row-major (y index outer).
struct GridField {
  int n = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
  double min() const;
  double max() const;
  double contrast() const { return max() / min(); }
};

struct ConstantField {
  double value = 1.0;
};

using CoefficientField = std::variant<AnalyticPeriodic, GridField, ConstantField>;

double eval_periodic_A1(Point2 x, double epsilon);
double eval_periodic_Awell(Point2 x, double epsilon);

/// Point evaluation of any coefficient variant (grid fields are cell lookups, clamped to the grid).
double evaluate(const CoefficientField& field, Point2 x);

struct RandomFieldParams {
  double sigma2 = 1.5;     ///< variance of the log-permeability
  double l1 = 0.01;        ///< correlation length in x
  double l2 = 0.01;        ///< correlation length in y
  int resolution = 256;
  std::uint64_t seed = 0;
};

/// Log-normal field by moving-ellipse averaging of white noise.
///
/// Standard normals (mt19937_64 + Box-Muller, fixed transform) are drawn per cell; each cell value
/// is the mean of all draws whose cell centers fall inside the ellipse ((x-x0)/l1)^2+((y-y0)/l2)^2<=1,
/// wrapping periodically. The averaged field is shifted and scaled to empirical mean 0 and
/// variance sigma2, then exponentiated. sigma2 == 0 yields the constant field 1.
GridField generate_lognormal_field(const RandomFieldParams& params);

struct ChannelLayout {
  std::vector<Rect> channel_rects;    ///< value channel_value
  std::vector<Rect> inclusion_rects;  ///< value inclusion_value
  double channel_value = 1e5;
  double inclusion_value = 8e4;
  double background = 1.0;
};

/// Cell value is the channel value if the cell center lies in a channel rectangle, else the
/// inclusion value if it lies in an inclusion, else the background. Rectangles must be cell-aligned.
GridField build_channel_field(const ChannelLayout& layout, int resolution);

/// Two horizontal channels of thickness 1/128 built from abutting rectangles, plus periodic square
/// inclusions kept clear of the channel layers; the high-contrast benchmark used by the channel runs.
ChannelLayout high_contrast_channel_layout();

/// Coefficient value at each triangle barycenter.
std::vector<double> sample_per_element(const CoefficientField& field, const TriMesh& mesh);

/// Header line "n", then n*n values row-major, 17 significant digits.
void write_grid_field(std::ostream& out, const GridField& field);
GridField read_grid_field(std::istream& in);

}  // namespace felod
