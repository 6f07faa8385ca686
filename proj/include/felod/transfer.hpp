#pragma once

#include <vector>

#include "felod/assembly.hpp"

namespace felod {

/// Clément weights of the coarse Omega_2 hats. Row r belongs to the coarse node carrying V_{h,H}
/// unknown n_omega1 + r; nodes on the outer boundary have no row, nodes on Gamma do.
struct ClementWeights {
  std::vector<int> node;     ///< coarse_omega2 vertex of each row
  Vector denominators;       ///< (1, Phi_z)_{Omega_2}
  SparseMatrix pairing;      ///< rows x V_{h,h} unknowns: (phi_i, Phi_z)_{Omega_2}; Omega_1 columns empty

  int rows() const { return static_cast<int>(node.size()); }
};

/// Exact hat pairings by nesting (Phi_z is linear on every fine triangle).
ClementWeights build_clement_weights(const DomainPartition& partition, const DofLayout& fine,
                                     const DofLayout& coarse);

/// Coarse nodal values u_z = (v, Phi_z)/(1, Phi_z) of the Omega_2 part of a V_{h,h} vector.
Vector clement_interpolate(const ClementWeights& weights, const Vector& v_fine);

/// Pi_h on V_{h,Omega_1} is the identity.
Vector l2_project_fine(const Vector& v_omega1);

/// L2 projection of a function onto V_{h,Omega_1}: solves M c = (f, phi_i) with mid-edge quadrature.
Vector l2_project_fine(const DomainPartition& partition, const DofLayout& fine, const ScalarFunction& f);

/// C_{h,H}: copies the Omega_1 block, Clément-interpolates the Omega_2 block.
Vector apply_C_hH(const ClementWeights& weights, const DofLayout& fine, const DofLayout& coarse,
                  const Vector& v);

/// Kernel constraints on a set of fine Omega_2 unknowns.
struct ConstraintMatrix {
  std::vector<int> rows;     ///< Clément rows kept
  std::vector<int> columns;  ///< V_{h,h} unknowns (sorted)
  SparseMatrix entries;      ///< (phi_column, Phi_row)
  Vector denominators;       ///< (1, Phi_row) per kept row

  /// Rows divided by their denominators (the Clément values themselves).
  SparseMatrix normalized() const;
};

/// Fine Omega_2 unknowns strictly inside the patch: every fine Omega_2 triangle around the vertex
/// belongs to a patch element. Gamma vertices qualify; vertices on the patch boundary do not.
std::vector<int> patch_unknowns(const DomainPartition& partition, const DofLayout& fine,
                                const Patch& patch);

/// All rows over all fine Omega_2 unknowns (patch == nullptr), or the rows of patch nodes restricted
/// to the patch unknowns with identically vanishing rows dropped.
ConstraintMatrix constraint_rows(const DomainPartition& partition, const DofLayout& fine,
                                 const ClementWeights& weights, const Patch* patch = nullptr);

}  // namespace felod
