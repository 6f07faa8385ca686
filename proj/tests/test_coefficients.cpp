#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "felod/assembly.hpp"
#include "felod/coefficients.hpp"

using namespace felod;

TEST_CASE("oscillating periodic coefficient") {
  CHECK(eval_periodic_A1({0.0, 0.0}, 0.2) == doctest::Approx(2.0 / 3.8 + 1.0).epsilon(1e-15));
  CHECK(eval_periodic_A1({0.0, 0.0}, 1.0 / 20) == doctest::Approx(1.5263157894736843).epsilon(1e-15));
  const double eps = 0.2;
  for (Point2 x : {Point2{0.13, 0.41}, Point2{0.37, 0.77}, Point2{0.5, 0.05}}) {
    CHECK(eval_periodic_A1({x.x + eps, x.y}, eps) == doctest::Approx(eval_periodic_A1(x, eps)).epsilon(1e-12));
    CHECK(eval_periodic_A1({x.x, x.y + eps}, eps) == doctest::Approx(eval_periodic_A1(x, eps)).epsilon(1e-12));
  }
  // Each quotient is at least 0.2/3.8, so the coefficient is bounded below by 0.4/3.8.
  double lo = 1e300, hi = 0.0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = eval_periodic_A1({(i + 0.5) / n, (j + 0.5) / n}, eps);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  CHECK(lo >= 0.4 / 3.8);
  CHECK(hi <= 2 * 3.8 / 0.2);
}

TEST_CASE("well-test coefficient") {
  const double eps = 1.0 / 64;
  CHECK(eval_periodic_Awell({0.0, 0.0}, eps) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(eval_periodic_Awell({eps / 4, eps / 4}, eps) == doctest::Approx(1.0 / 12.25).epsilon(1e-14));
  CHECK(eval_periodic_Awell({3 * eps / 4, 3 * eps / 4}, eps) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(evaluate(AnalyticPeriodic{PeriodicFormula::WellProduct, eps}, {0.3, 0.6}) ==
        eval_periodic_Awell({0.3, 0.6}, eps));
}

TEST_CASE("log-normal field") {
  RandomFieldParams p;
  p.resolution = 64;
  p.l1 = p.l2 = 0.05;
  p.seed = 7;
  p.sigma2 = 0.0;
  const GridField flat = generate_lognormal_field(p);
  for (double v : flat.values) CHECK(v == 1.0);

  p.sigma2 = 1.5;
  const GridField a = generate_lognormal_field(p);
  const GridField b = generate_lognormal_field(p);
  CHECK(a.values == b.values);
  double mean = 0.0, var = 0.0;
  for (double v : a.values) mean += std::log(v);
  mean /= a.values.size();
  for (double v : a.values) var += (std::log(v) - mean) * (std::log(v) - mean);
  var /= a.values.size();
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(var == doctest::Approx(1.5).epsilon(1e-10));

  p.seed = 8;
  CHECK(generate_lognormal_field(p).values != a.values);
}

TEST_CASE("log-normal contrast at the correlation length of the L-shape runs") {
  RandomFieldParams p;
  p.sigma2 = 1.5;
  p.l1 = p.l2 = 0.01;
  p.resolution = 512;
  p.seed = 20240601;
  const GridField f = generate_lognormal_field(p);
  CHECK(f.contrast() >= 1e2);
  CHECK(f.contrast() <= 1e5);
}

TEST_CASE("channel fields") {
  const GridField empty = build_channel_field(ChannelLayout{}, 32);
  for (double v : empty.values) CHECK(v == 1.0);

  ChannelLayout one;
  one.channel_rects.push_back({0.0, 1.0, 0.5 - std::ldexp(1.0, -10), 0.5});
  const GridField line = build_channel_field(one, 1024);
  CHECK(line.contrast() == doctest::Approx(1e5));

  const GridField full = build_channel_field(high_contrast_channel_layout(), 256);
  const std::set<double> values(full.values.begin(), full.values.end());
  CHECK(values == std::set<double>{1.0, 8e4, 1e5});
}

TEST_CASE("element sampling") {
  const TriMesh m = build_uniform_tri_mesh(Domain::UnitSquare, 16);
  for (double v : sample_per_element(ConstantField{3.5}, m)) CHECK(v == 3.5);

  GridField g;
  g.n = 16;
  for (int k = 0; k < 256; ++k) g.values.push_back(1.0 + k);
  const auto s = sample_per_element(g, m);
  for (int t = 0; t < m.num_triangles(); ++t) CHECK(s[t] == g.values[m.triangle_cell[t]]);

  const TriMesh fine = build_uniform_tri_mesh(Domain::UnitSquare, 128);
  const auto a = sample_per_element(AnalyticPeriodic{PeriodicFormula::Oscillating, 0.2}, fine);
  for (double v : a) {
    CHECK(v >= 0.4 / 3.8);
    CHECK(v <= 2 * 3.8 / 0.2);
  }
}

TEST_CASE("grid field text round trip") {
  RandomFieldParams p;
  p.resolution = 16;
  p.l1 = p.l2 = 0.1;
  p.seed = 3;
  const GridField a = generate_lognormal_field(p);
  std::stringstream s;
  write_grid_field(s, a);
  const GridField b = read_grid_field(s);
  CHECK(b.n == a.n);
  CHECK(b.values == a.values);
}
