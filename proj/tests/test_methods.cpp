#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "felod/methods.hpp"
#include "felod/norms.hpp"

using namespace felod;

namespace {

LoadSpec unit_load() {
  LoadSpec l;
  l.f = [](Point2) { return 1.0; };
  return l;
}

}  // namespace

TEST_CASE("zero load gives a zero solution") {
  const Omega1Region o1{{Rect{0.25, 0.5, 0.25, 0.5}}};
  const DomainPartition p = partition_domain(Domain::UnitSquare, o1, 4, 16);
  const Discretization d = discretize(p, AnalyticPeriodic{});
  const Vector b = Vector::Zero(d.fine.size());
  CHECK(solve_reference(d, b).solution.norm() == 0.0);
  CHECK(solve_fe_lodm(d, b, 1).solution.norm() == 0.0);
}

TEST_CASE("manufactured solution converges at second order in L2") {
  const double pi = std::numbers::pi;
  LoadSpec load;
  load.f = [pi](Point2 x) { return 2 * pi * pi * std::sin(pi * x.x) * std::sin(pi * x.y); };
  std::vector<double> errors;
  for (int n : {16, 32, 64}) {
    const Omega1Region o1{{Rect{0.25, 0.5, 0.25, 0.75}}};
    const DomainPartition p = partition_domain(Domain::UnitSquare, o1, 4, n);
    const Discretization d = discretize(p, ConstantField{1.0});
    const Vector u = solve_reference(d, assemble_load(d, load)).solution;
    Vector exact = Vector::Zero(d.fine.size());
    auto g = [pi](Point2 x) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
    for (int i = 0; i < p.fine_omega1.num_vertices(); ++i) exact[d.fine.omega1_dof[i]] = g(p.fine_omega1.vertices[i]);
    for (int i = 0; i < p.fine_omega2.num_vertices(); ++i) {
      if (d.fine.omega2_dof[i] >= 0) exact[d.fine.omega2_dof[i]] = g(p.fine_omega2.vertices[i]);
    }
    errors.push_back(l2_norm(p, d.fine, Vector(u - exact), Region::omega()));
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double rate = std::log2(errors[k - 1] / errors[k]);
    CHECK(rate > 1.8);
    CHECK(rate < 2.2);
  }
}

TEST_CASE("interface jumps shrink as the penalty grows") {
  const Omega1Region o1{{Rect{0.25, 0.5, 0.25, 0.5}}};
  const DomainPartition p = partition_domain(Domain::UnitSquare, o1, 4, 32);
  double previous = 1e300;
  for (double gamma0 : {10.0, 100.0, 1000.0}) {
    const Discretization d = discretize(p, AnalyticPeriodic{}, gamma0);
    const Vector u = solve_reference(d, assemble_load(d, unit_load())).solution;
    const double jump = jump_norm(p, d.fine, u, Region::omega());
    CHECK(jump < previous);
    previous = jump;
  }
}

TEST_CASE("saturated FE-LODM equals the ideal method and is exact on Omega_1") {
  const Omega1Region o1{{Rect{0.25, 0.5, 0.25, 0.5}}};
  const DomainPartition p = partition_domain(Domain::UnitSquare, o1, 4, 16);
  const Discretization d = discretize(p, AnalyticPeriodic{PeriodicFormula::Oscillating, 0.2});
  const Vector b = assemble_load(d, unit_load());
  const SolveResult ideal = solve_ideal(d, b);
  const SolveResult sat = solve_fe_lodm(d, b, saturated_level);
  CHECK((ideal.solution - sat.solution).lpNorm<Eigen::Infinity>() <= 1e-10);
  const Vector ref = solve_reference(d, b).solution;
  CHECK((ideal.solution - ref).head(d.fine.n_omega1).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(ideal.residual <= 1e-10);
  CHECK(ideal.system_size == d.coarse.size());
}

TEST_CASE("Galerkin orthogonality of the multiscale solutions") {
  const Omega1Region o1{{Rect{0.25, 0.5, 0.25, 0.5}}};
  const DomainPartition p = partition_domain(Domain::UnitSquare, o1, 8, 32);
  const Discretization d = discretize(p, AnalyticPeriodic{PeriodicFormula::Oscillating, 0.1});
  const Vector b = assemble_load(d, unit_load());
  const Vector ref = solve_reference(d, b).solution;
  const double scale = (SparseMatrix(d.prolongation.transpose()) * (d.stiffness * ref)).lpNorm<Eigen::Infinity>();
  const SparseMatrix ideal_basis = d.prolongation - global_corrector(d);
  const Vector ideal = solve_in_basis(d, ideal_basis, b, Method::Ideal, saturated_level).solution;
  CHECK((SparseMatrix(ideal_basis.transpose()) * (d.stiffness * (ref - ideal))).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
  const MultiscaleBasis local = build_multiscale_basis(d, 2);
  const SparseMatrix basis = local.basis(d);
  const Vector u = solve_fe_lodm(d, local, b).solution;
  CHECK((SparseMatrix(basis.transpose()) * (d.stiffness * (ref - u))).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
}

TEST_CASE("stability of the ideal solution across coarse sizes") {
  const Omega1Region o1{{Rect{0.25, 0.5, 0.25, 0.5}}};
  std::vector<double> ratios;
  for (int nc : {4, 8}) {
    const DomainPartition p = partition_domain(Domain::UnitSquare, o1, nc, 32);
    const Discretization d = discretize(p, AnalyticPeriodic{PeriodicFormula::Oscillating, 0.2});
    const Vector u = solve_ideal(d, assemble_load(d, unit_load())).solution;
    ratios.push_back(norm_hh(p, d.coeffs, d.fine, d.penalty, u, Region::omega()));
  }
  CHECK(ratios[0] / ratios[1] == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("empty Omega_1 reduces to the LOD method") {
  const DomainPartition p = partition_domain(Domain::UnitSquare, Omega1Region{}, 4, 16);
  const Discretization d = discretize(p, AnalyticPeriodic{PeriodicFormula::Oscillating, 0.2});
  CHECK(d.fine.n_omega1 == 0);
  const Vector b = assemble_load(d, unit_load());
  const Vector ideal = solve_ideal(d, b).solution;
  const Vector sat = solve_fe_lodm(d, b, saturated_level).solution;
  CHECK((ideal - sat).lpNorm<Eigen::Infinity>() <= 1e-10);
  const SolveResult baseline = solve_lodm_baseline(p, AnalyticPeriodic{PeriodicFormula::Oscillating, 0.2}, unit_load(), 2);
  CHECK(baseline.method == Method::Lodm);
  CHECK((baseline.solution - solve_fe_lodm(d, b, 2).solution).norm() == 0.0);

  const DomainPartition with = partition_domain(Domain::UnitSquare, Omega1Region{{Rect{0.25, 0.5, 0.25, 0.5}}}, 4, 16);
  CHECK_THROWS_AS(solve_lodm_baseline(with, ConstantField{}, unit_load(), 1), std::invalid_argument);
}

TEST_CASE("transfer between partitions preserves nodal values") {
  const Omega1Region o1{{Rect{0.25, 0.5, 0.25, 0.5}}};
  const DomainPartition p = partition_domain(Domain::UnitSquare, o1, 4, 16);
  const DomainPartition p0 = partition_domain(Domain::UnitSquare, Omega1Region{}, 4, 16);
  const DofLayout l = make_layout(p, SpaceKind::FineFine);
  const DofLayout l0 = make_layout(p0, SpaceKind::FineFine);
  Vector v(l0.size());
  for (int i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * i);
  const Vector w = transfer_fine_function(p0, l0, v, p, l);
  for (Point2 x : {Point2{0.3, 0.3}, Point2{0.25, 0.4}, Point2{0.7, 0.2}, Point2{0.5, 0.5}}) {
    CHECK(evaluate_fine_function(p, l, w, x) == doctest::Approx(evaluate_fine_function(p0, l0, v, x)).epsilon(1e-14));
  }
  CHECK(jump_norm(p, l, w, Region::omega()) == 0.0);
}

TEST_CASE("well-bore pressure") {
  const double s = 1.0 / 16;
  const Omega1Region o1{{Rect{0.25 - s, 0.25 + s, 0.75 - s, 0.75 + s}, Rect{0.75 - s, 0.75 + s, 0.25 - s, 0.25 + s}}};
  const DomainPartition p = partition_domain(Domain::UnitSquare, o1, 16, 64);
  const Discretization d = discretize(p, ConstantField{2.0});
  std::vector<Well> wells{{{0.25, 0.75}, -1.0, 1e-5}, {{0.75, 0.25}, 1.0, 1e-5}};
  LoadSpec load;
  load.wells = wells;
  const Vector u = solve_reference(d, assemble_load(d, load)).solution;
  const auto wbp = compute_wbp(p, d.coeffs, d.fine, u, wells);
  const double r0 = 0.2 / 64;
  for (int j = 0; j < 2; ++j) {
    const double at = evaluate_fine_function(p, d.fine, u, wells[j].position);
    CHECK(wbp[j] == doctest::Approx(at + wells[j].rate / (2 * std::numbers::pi * 2.0) * std::log(r0 / 1e-5)));
  }
  // Mirror symmetry x <-> y of the mesh and coefficient.
  CHECK(std::abs(wbp[0] + wbp[1]) <= 1e-10 * std::abs(wbp[0]));

  std::vector<Well> silent{{{0.25, 0.75}, 0.0, 1e-5}};
  CHECK(compute_wbp(p, d.coeffs, d.fine, u, silent)[0] == evaluate_fine_function(p, d.fine, u, {0.25, 0.75}));

  std::vector<Well> wide{{{0.25, 0.75}, 1.0, 0.1}};
  CHECK_THROWS_AS(compute_wbp(p, d.coeffs, d.fine, u, wide), std::invalid_argument);

  std::ostringstream out;
  write_wbp(out, {1.5, -2.0});
  CHECK(out.str() == "well 1: wbp 1.5\nwell 2: wbp -2\n");
}

TEST_CASE("reference well-bore pressures settle under refinement") {
  const double s = 1.0 / 16;
  const Omega1Region o1{{Rect{0.25 - s, 0.25 + s, 0.75 - s, 0.75 + s}, Rect{0.75 - s, 0.75 + s, 0.25 - s, 0.25 + s}}};
  const std::vector<Well> wells{{{0.25, 0.75}, -1.0, 1e-5}, {{0.75, 0.25}, 1.0, 1e-5}};
  LoadSpec load;
  load.wells = wells;
  std::vector<double> w;
  for (int n : {64, 128, 256}) {
    const DomainPartition p = partition_domain(Domain::UnitSquare, o1, 16, n);
    const Discretization d = discretize(p, AnalyticPeriodic{PeriodicFormula::WellProduct, 1.0 / 4});
    const Vector u = solve_reference(d, assemble_load(d, load)).solution;
    w.push_back(compute_wbp(p, d.coeffs, d.fine, u, wells)[0]);
  }
  CHECK(std::abs(w[2] - w[1]) < std::abs(w[1] - w[0]));
}

TEST_CASE("solution export") {
  std::ostringstream out;
  Vector v(2);
  v << 0.5, -1.25;
  write_solution(out, v);
  CHECK(out.str() == "0 0.5\n1 -1.25\n");
  CHECK(method_name(Method::FeLodm) == "fe-lodm");
  CHECK(method_name(Method::Lodm) == "lodm");
}
