#pragma once

#include <limits>
#include <vector>

#include "felod/linalg.hpp"
#include "felod/transfer.hpp"

namespace felod {

using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Everything the solvers share for one partition and coefficient: both layouts, the local forms,
/// the assembled operator a_Omega on V_{h,h}, the injection V_{h,H} -> V_{h,h} and the Clément weights.
struct Discretization {
  const DomainPartition* partition = nullptr;
  ElementCoefficients coeffs;
  PenaltyConfig penalty;
  DofLayout fine;
  DofLayout coarse;
  LocalForms locals;
  SparseMatrix stiffness;
  SparseMatrix prolongation;
  RowSparseMatrix prolongation_rows;
  ClementWeights weights;
};

Discretization discretize(const DomainPartition& partition, const CoefficientField& field,
                          double gamma0 = 10.0, Execution exec = Execution::Parallel);

/// Level large enough that every patch is all of M_{H,Omega_2}.
inline constexpr int saturated_level = std::numeric_limits<int>::max();

/// L = ceil(L0 |log10 sqrt(H h)|).
int choose_L(double H, double h, double L0);

/// a_{T~}(psi_i, w) for all V_{h,H} basis functions psi_i (columns) and all fine Omega_2 unknowns
/// w of V_{h,h} (rows; other rows are empty): the Omega_2 volume terms of T's children plus the
/// interface terms of the fine edges on T ∩ Gamma.
SparseMatrix corrector_rhs(const Discretization& disc, int T);

/// The saddle-point problem of one patch: a_Omega on the patch unknowns, normalized Clément rows.
struct CorrectorProblem {
  Patch patch;
  std::vector<int> unknowns;  ///< V_{h,h} unknowns of W_{0,h}(T_L) (sorted)
  SparseMatrix stiffness;     ///< a_Omega restricted to the unknowns
  ConstraintMatrix constraints;
};

CorrectorProblem make_corrector_problem(const Discretization& disc, const Patch& patch);

/// Factored patch problem, reusable for any number of right-hand sides.
class LocalCorrectorSolver {
 public:
  explicit LocalCorrectorSolver(CorrectorProblem problem);

  const CorrectorProblem& problem() const { return problem_; }
  /// Solves for the columns of `rhs` (rows indexed like problem().unknowns).
  DenseMatrix solve(const DenseMatrix& rhs) const;
  /// max_i |B q_i| / max(|q_i|, tiny) over the columns of q, with normalized rows.
  double constraint_residual(const DenseMatrix& q) const;

 private:
  CorrectorProblem problem_;
  SaddlePointSolver saddle_;
};

/// One-shot solve of a corrector problem for the given right-hand side columns; throws
/// FactorizationError naming the patch seed on breakdown.
DenseMatrix solve_local_corrector(const CorrectorProblem& problem, const DenseMatrix& rhs);

/// Q_h^{T,L} for every coarse element T, as V_{h,h} x V_{h,H} matrices (L = saturated_level gives
/// the element correctors Q_h^T). Patches with identical element sets share one factorization.
std::vector<SparseMatrix> element_correctors(const Discretization& disc, int L,
                                             Execution exec = Execution::Parallel);

struct MultiscaleBasis {
  int level = 0;
  SparseMatrix correctors;                 ///< Q_h^L psi_i in column i (V_{h,h} rows, Omega_2 only)
  std::vector<int> corrected;              ///< basis functions with a nonzero corrector right-hand side
  std::vector<std::vector<int>> footprint; ///< per basis function: union of the patches used (sorted)
  double constraint_residual = 0.0;        ///< largest relative residual over all patch solves

  /// The multiscale basis psi_i - Q psi_i expressed in V_{h,h}.
  SparseMatrix basis(const Discretization& disc) const;
};

/// V^{ms,L}_{h,H} = (I - Q_h^L) V_{h,H}. Element right-hand sides sharing a patch are summed before
/// the solve; the reduction over patches follows a fixed order, so the serial and parallel paths
/// give identical results.
MultiscaleBasis build_multiscale_basis(const Discretization& disc, int L,
                                       Execution exec = Execution::Parallel);

/// The global corrector Q_h psi_i from one monolithic saddle solve over all of Omega_2.
/// Throws std::length_error above `max_unknowns` fine Omega_2 unknowns.
SparseMatrix global_corrector(const Discretization& disc, int max_unknowns = 400000);

/// Sparse text dump "i j value" of a corrector matrix (V_{h,h} row, V_{h,H} column).
void write_correctors(std::ostream& out, const SparseMatrix& correctors);

}  // namespace felod
