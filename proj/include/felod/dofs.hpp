#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

#include "felod/mesh.hpp"

namespace felod {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class SpaceKind {
  FineFine,    ///< V_{h,h}: fine P1 on Omega_1 and on Omega_2, discontinuous across Gamma
  FineCoarse,  ///< V_{h,H}: fine P1 on Omega_1, coarse P1 on Omega_2
};

/// Unknown numbering: Omega_1 fine vertices first, then Omega_2 vertices (fine or coarse).
/// Vertices on the outer boundary carry no unknown (-1). Interface vertices get one unknown per side.
struct DofLayout {
  SpaceKind kind = SpaceKind::FineFine;
  std::vector<int> omega1_dof;  ///< per fine_omega1 vertex
  std::vector<int> omega2_dof;  ///< per fine_omega2 (FineFine) or coarse_omega2 (FineCoarse) vertex
  int n_omega1 = 0;
  int n_omega2 = 0;

  int size() const { return n_omega1 + n_omega2; }
};

DofLayout make_layout(const DomainPartition& partition, SpaceKind kind);

/// Coefficients of a function in the space described by `space`.
struct DiscreteFunction {
  SpaceKind space = SpaceKind::FineFine;
  Vector values;
};

/// Injection V_{h,H} -> V_{h,h}: identity on Omega_1, coarse hats interpolated at fine Omega_2 vertices.
SparseMatrix prolongation(const DomainPartition& partition, const DofLayout& fine,
                          const DofLayout& coarse);

/// Re-expresses a V_{h,h} function of `from` in the V_{h,h} layout of `to` (same domain and fine grid).
/// Values are matched by fine grid vertex, preferring the same subdomain side.
Vector transfer_fine_function(const DomainPartition& from, const DofLayout& from_layout,
                              const Vector& values, const DomainPartition& to,
                              const DofLayout& to_layout);

/// Value of a V_{h,h} function at p, evaluated from the Omega_1 side when p lies in Omega_1.
double evaluate_fine_function(const DomainPartition& partition, const DofLayout& layout,
                              const Vector& values, Point2 p);

}  // namespace felod
