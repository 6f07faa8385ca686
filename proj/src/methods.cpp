#include "felod/methods.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace felod {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr int dense_coarse_limit = 4000;

// Geometric mean of the coefficient over all fine triangles whose closure contains p.
double touching_mean(const DomainPartition& p, const ElementCoefficients& coeffs, Point2 x) {
  double log_sum = 0.0;
  int count = 0;
  auto scan = [&](const TriMesh& mesh, const std::vector<double>& a) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      const Point2 v0 = mesh.vertices[tri[0]];
      const Point2 v1 = mesh.vertices[tri[1]];
      const Point2 v2 = mesh.vertices[tri[2]];
      const double area2 = cross(v1 - v0, v2 - v0);
      const double tol = -1e-12 * area2;
      if (cross(v1 - v0, x - v0) >= tol && cross(v2 - v1, x - v1) >= tol &&
          cross(v0 - v2, x - v2) >= tol) {
        log_sum += std::log(a[t]);
        ++count;
      }
    }
  };
  scan(p.fine_omega1, coeffs.omega1);
  scan(p.fine_omega2, coeffs.omega2);
  if (count == 0) throw std::invalid_argument("well outside the domain");
  return std::exp(log_sum / count);
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::Reference: return "reference";
    case Method::Ideal: return "ideal";
    case Method::FeLodm: return "fe-lodm";
    case Method::Lodm: return "lodm";
  }
  return "unknown";
}

Vector assemble_load(const Discretization& disc, const LoadSpec& load) {
  if (!load.wells.empty()) return assemble_load_dirac(*disc.partition, disc.fine, load.wells);
  if (!load.f) return Vector::Zero(disc.fine.size());
  return assemble_load_l2(*disc.partition, disc.fine, load.f);
}

SolveResult solve_reference(const Discretization& disc, const Vector& load) {
  const auto start = Clock::now();
  SolveResult r;
  r.method = Method::Reference;
  const SpdSolver solver(disc.stiffness, "reference IPCDG system");
  r.solution = solver.solve(load);
  r.residual = solver.last_residual();
  r.system_size = solver.size();
  r.seconds = seconds_since(start);
  return r;
}

SolveResult solve_in_basis(const Discretization& disc, const SparseMatrix& basis, const Vector& load,
                           Method method, int level) {
  const auto start = Clock::now();
  SolveResult r;
  r.method = method;
  r.level = level;
  const SparseMatrix kb = disc.stiffness * basis;
  SparseMatrix a = SparseMatrix(basis.transpose()) * kb;
  a = 0.5 * (a + SparseMatrix(a.transpose()));
  const Vector b = basis.transpose() * load;
  r.system_size = static_cast<int>(a.rows());
  Vector c;
  const std::string context = method_name(method) + " coarse system";
  if (a.rows() <= dense_coarse_limit) {
    c = solve_dense_spd(DenseMatrix(a), b, context);
    r.residual = backward_error(a, c, b);
    if (!(r.residual <= SpdSolver::tolerance)) {
      throw SolverAccuracyError(context + ": backward error " + std::to_string(r.residual));
    }
  } else {
    const SpdSolver solver(a, context);
    c = solver.solve(b);
    r.residual = solver.last_residual();
  }
  r.solution = basis * c;
  r.seconds = seconds_since(start);
  return r;
}

SolveResult solve_ideal(const Discretization& disc, const Vector& load, int max_unknowns) {
  const auto start = Clock::now();
  const SparseMatrix q = global_corrector(disc, max_unknowns);
  SolveResult r = solve_in_basis(disc, disc.prolongation - q, load, Method::Ideal, saturated_level);
  r.seconds = seconds_since(start);
  return r;
}

SolveResult solve_fe_lodm(const Discretization& disc, const Vector& load, int L, Execution exec) {
  const auto start = Clock::now();
  const MultiscaleBasis basis = build_multiscale_basis(disc, L, exec);
  SolveResult r = solve_fe_lodm(disc, basis, load);
  r.seconds = seconds_since(start);
  return r;
}

SolveResult solve_fe_lodm(const Discretization& disc, const MultiscaleBasis& basis, const Vector& load) {
  return solve_in_basis(disc, basis.basis(disc), load, Method::FeLodm, basis.level);
}

SolveResult solve_lodm_baseline(const DomainPartition& baseline, const CoefficientField& field,
                                const LoadSpec& load, int L, double gamma0, Execution exec) {
  if (!baseline.omega1.empty()) throw std::invalid_argument("the LOD baseline needs an empty Omega_1");
  const auto start = Clock::now();
  const Discretization disc = discretize(baseline, field, gamma0, exec);
  SolveResult r = solve_fe_lodm(disc, assemble_load(disc, load), L, exec);
  r.method = Method::Lodm;
  r.seconds = seconds_since(start);
  return r;
}

std::vector<double> compute_wbp(const DomainPartition& partition, const ElementCoefficients& coeffs,
                                const DofLayout& layout, const Vector& solution,
                                const std::vector<Well>& wells) {
  const double r0 = 0.2 * partition.h();
  std::vector<double> out;
  for (const Well& w : wells) {
    if (!(w.radius > 0.0 && w.radius < r0)) {
      throw std::invalid_argument("well radius must lie in (0, 0.2 h)");
    }
    const double u = evaluate_fine_function(partition, layout, solution, w.position);
    const double a = touching_mean(partition, coeffs, w.position);
    out.push_back(u + w.rate / (2.0 * std::numbers::pi * a) * std::log(r0 / w.radius));
  }
  return out;
}

void write_solution(std::ostream& out, const Vector& solution) {
  const auto precision = out.precision(17);
  for (int i = 0; i < solution.size(); ++i) out << i << ' ' << solution[i] << '\n';
  out.precision(precision);
}

void write_wbp(std::ostream& out, const std::vector<double>& wbp) {
  const auto precision = out.precision(10);
  for (std::size_t j = 0; j < wbp.size(); ++j) out << "well " << j + 1 << ": wbp " << wbp[j] << '\n';
  out.precision(precision);
}

}  // namespace felod
