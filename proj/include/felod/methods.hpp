#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "felod/correctors.hpp"

namespace felod {

enum class Method { Reference, Ideal, FeLodm, Lodm };

std::string method_name(Method method);

/// Right-hand side: an L2 source f, or point sources when `wells` is nonempty.
struct LoadSpec {
  ScalarFunction f;
  std::vector<Well> wells;
};

Vector assemble_load(const Discretization& disc, const LoadSpec& load);

struct SolveResult {
  Method method = Method::Reference;
  int level = -1;            ///< patch level of the correctors (-1 when not applicable)
  Vector solution;           ///< V_{h,h} coefficients on the partition the method ran on
  int system_size = 0;       ///< unknowns of the solved linear system
  double seconds = 0.0;
  double residual = 0.0;     ///< backward error of the final linear solve
};

/// The fine IPCDG solution of a_Omega(u, v) = (f, v) on V_{h,h}.
SolveResult solve_reference(const Discretization& disc, const Vector& load);

/// Galerkin solve in span(basis), expanded to V_{h,h}; `basis` is V_{h,h} x V_{h,H}.
SolveResult solve_in_basis(const Discretization& disc, const SparseMatrix& basis, const Vector& load,
                           Method method, int level);

/// The ideal method with global correctors (monolithic saddle solve, size-guarded).
SolveResult solve_ideal(const Discretization& disc, const Vector& load, int max_unknowns = 400000);

SolveResult solve_fe_lodm(const Discretization& disc, const Vector& load, int L,
                          Execution exec = Execution::Parallel);

/// FE-LODM with a prebuilt basis.
SolveResult solve_fe_lodm(const Discretization& disc, const MultiscaleBasis& basis, const Vector& load);

/// Pure LOD on the same fine grid with Omega_1 empty. The returned solution lives on the
/// Omega_1-free partition `baseline`, which the caller keeps alive.
SolveResult solve_lodm_baseline(const DomainPartition& baseline, const CoefficientField& field,
                                const LoadSpec& load, int L, double gamma0 = 10.0,
                                Execution exec = Execution::Parallel);

/// Peaceman well-bore pressure u(P) + q/(2 pi Abar) ln(r0/r_w), r0 = 0.2 h, Abar the geometric
/// mean of A over the fine elements touching P.
std::vector<double> compute_wbp(const DomainPartition& partition, const ElementCoefficients& coeffs,
                                const DofLayout& layout, const Vector& solution,
                                const std::vector<Well>& wells);

/// Nodal values "i value", one line per unknown.
void write_solution(std::ostream& out, const Vector& solution);

/// "well j: wbp value", wells numbered from 1.
void write_wbp(std::ostream& out, const std::vector<double>& wbp);

}  // namespace felod
