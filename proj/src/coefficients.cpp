#include "felod/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace felod {

namespace {

bool aligned(double c, int n) { return std::abs(c * n - std::round(c * n)) < 1e-9; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double GridField::min() const { return *std::min_element(values.begin(), values.end()); }
double GridField::max() const { return *std::max_element(values.begin(), values.end()); }

double eval_periodic_A1(Point2 x, double epsilon) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double s1 = std::sin(two_pi * x.x / epsilon);
  const double s2 = std::sin(two_pi * x.y / epsilon);
  const double c2 = std::cos(two_pi * x.y / epsilon);
  return (2.0 + 1.8 * s1) / (2.0 + 1.8 * c2) + (2.0 + 1.8 * s2) / (2.0 + 1.8 * s1);
}

double eval_periodic_Awell(Point2 x, double epsilon) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return 1.0 / ((2.0 + 1.5 * std::sin(two_pi * x.x / epsilon)) *
                (2.0 + 1.5 * std::sin(two_pi * x.y / epsilon)));
}

double evaluate(const CoefficientField& field, Point2 x) {
  return std::visit(
      Overloaded{
          [x](const AnalyticPeriodic& a) {
            return a.formula == PeriodicFormula::Oscillating ? eval_periodic_A1(x, a.epsilon)
                                                             : eval_periodic_Awell(x, a.epsilon);
          },
          [x](const GridField& g) {
            const int i = std::clamp(static_cast<int>(std::floor(x.x * g.n)), 0, g.n - 1);
            const int j = std::clamp(static_cast<int>(std::floor(x.y * g.n)), 0, g.n - 1);
            return g.at(i, j);
          },
          [](const ConstantField& c) { return c.value; },
      },
      field);
}

GridField generate_lognormal_field(const RandomFieldParams& params) {
  if (params.sigma2 < 0.0) throw std::invalid_argument("log-variance must be nonnegative");
  if (!(params.l1 > 0.0 && params.l1 < 1.0 && params.l2 > 0.0 && params.l2 < 1.0)) {
    throw std::invalid_argument("correlation lengths must lie in (0,1)");
  }
  const int n = params.resolution;
  if (n < 1 || n < 1.0 / std::min(params.l1, params.l2)) {
    throw std::invalid_argument("field resolution is coarser than the correlation ellipse");
  }
  GridField field{n, std::vector<double>(static_cast<std::size_t>(n) * n, 1.0)};
  if (params.sigma2 == 0.0) return field;

  std::mt19937_64 engine(params.seed);
  auto uniform = [&engine] {
    // 53-bit uniform in (0,1]; the +1 keeps log() finite.
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
  };
  std::vector<double> noise(field.values.size());
  for (std::size_t k = 0; k < noise.size(); k += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    noise[k] = r * std::cos(theta);
    if (k + 1 < noise.size()) noise[k + 1] = r * std::sin(theta);
  }

  // Cell offsets whose centers lie within the ellipse around a cell center.
  const int ri = static_cast<int>(std::floor(params.l1 * n));
  const int rj = static_cast<int>(std::floor(params.l2 * n));
  std::vector<std::pair<int, int>> stencil;
  for (int dj = -rj; dj <= rj; ++dj) {
    for (int di = -ri; di <= ri; ++di) {
      const double ex = di / (params.l1 * n);
      const double ey = dj / (params.l2 * n);
      if (ex * ex + ey * ey <= 1.0) stencil.emplace_back(di, dj);
    }
  }

  std::vector<double> averaged(noise.size());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const auto& [di, dj] : stencil) {
        const int ii = ((i + di) % n + n) % n;
        const int jj = ((j + dj) % n + n) % n;
        sum += noise[static_cast<std::size_t>(jj) * n + ii];
      }
      averaged[static_cast<std::size_t>(j) * n + i] = sum / static_cast<double>(stencil.size());
    }
  }

  double mean = 0.0;
  for (double v : averaged) mean += v;
  mean /= static_cast<double>(averaged.size());
  double var = 0.0;
  for (double v : averaged) var += (v - mean) * (v - mean);
  var /= static_cast<double>(averaged.size());
  const double scale = var > 0.0 ? std::sqrt(params.sigma2 / var) : 0.0;
  for (std::size_t k = 0; k < averaged.size(); ++k) {
    field.values[k] = std::exp(scale * (averaged[k] - mean));
  }
  return field;
}

GridField build_channel_field(const ChannelLayout& layout, int resolution) {
  const int n = resolution;
  if (n < 1) throw std::invalid_argument("field resolution must be >= 1");
  auto check = [n](const std::vector<Rect>& rects) {
    for (const Rect& r : rects) {
      if (!(aligned(r.x0, n) && aligned(r.x1, n) && aligned(r.y0, n) && aligned(r.y1, n))) {
        throw std::invalid_argument("channel layout rectangle is not cell-aligned");
      }
      if (r.x0 < 0.0 || r.y0 < 0.0 || r.x1 > 1.0 || r.y1 > 1.0) {
        throw std::invalid_argument("channel layout rectangle outside the unit square");
      }
    }
  };
  check(layout.channel_rects);
  check(layout.inclusion_rects);
  if (!(layout.channel_value > 0 && layout.inclusion_value > 0 && layout.background > 0)) {
    throw std::invalid_argument("channel layout values must be positive");
  }
  GridField field{n, std::vector<double>(static_cast<std::size_t>(n) * n, layout.background)};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Point2 c{(i + 0.5) / n, (j + 0.5) / n};
      auto inside = [c](const Rect& r) { return r.contains(c); };
      double& v = field.values[static_cast<std::size_t>(j) * n + i];
      if (std::any_of(layout.channel_rects.begin(), layout.channel_rects.end(), inside)) {
        v = layout.channel_value;
      } else if (std::any_of(layout.inclusion_rects.begin(), layout.inclusion_rects.end(), inside)) {
        v = layout.inclusion_value;
      }
    }
  }
  return field;
}

ChannelLayout high_contrast_channel_layout() {
  ChannelLayout layout;
  for (double yc : {5.0 / 16.0, 11.0 / 16.0}) {
    for (int k = 0; k < 12; ++k) {
      const double x0 = 1.0 / 8.0 + k / 16.0;
      layout.channel_rects.push_back({x0, x0 + 1.0 / 16.0, yc - 1.0 / 256.0, yc + 1.0 / 256.0});
    }
  }
  for (double yc : {1.0 / 8.0, 1.0 / 2.0, 7.0 / 8.0}) {
    for (int k = 1; k <= 7; ++k) {
      const double xc = k / 8.0;
      layout.inclusion_rects.push_back(
          {xc - 1.0 / 128.0, xc + 1.0 / 128.0, yc - 1.0 / 128.0, yc + 1.0 / 128.0});
    }
  }
  return layout;
}

std::vector<double> sample_per_element(const CoefficientField& field, const TriMesh& mesh) {
  std::vector<double> values(mesh.num_triangles());
#pragma omp parallel for schedule(static)
  for (int t = 0; t < mesh.num_triangles(); ++t) values[t] = evaluate(field, mesh.barycenter(t));
  return values;
}

void write_grid_field(std::ostream& out, const GridField& field) {
  out.precision(17);
  out << field.n << '\n';
  for (double v : field.values) out << v << '\n';
}

GridField read_grid_field(std::istream& in) {
  GridField field;
  if (!(in >> field.n) || field.n < 1) throw std::runtime_error("grid field: bad header");
  field.values.resize(static_cast<std::size_t>(field.n) * field.n);
  for (double& v : field.values) {
    if (!(in >> v)) throw std::runtime_error("grid field: truncated data");
    if (!(v > 0.0)) throw std::runtime_error("grid field: values must be positive");
  }
  return field;
}

}  // namespace felod
