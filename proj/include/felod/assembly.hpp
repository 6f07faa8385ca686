#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "felod/coefficients.hpp"
#include "felod/dofs.hpp"
#include "felod/parallel.hpp"

namespace felod {

/// Interface penalty gamma0/h; h is the fine mesh size of the active partition.
struct PenaltyConfig {
  double gamma0 = 10.0;
  double h = 0.0;
};

PenaltyConfig make_penalty(const DomainPartition& partition, double gamma0 = 10.0);

/// Barycenter samples of A on both fine meshes.
struct ElementCoefficients {
  std::vector<double> omega1;
  std::vector<double> omega2;
};

ElementCoefficients sample_partition(const CoefficientField& field, const DomainPartition& partition);

/// P1 stiffness of one fine triangle, A_t * area * grad(phi_i).grad(phi_j); -1 marks a Dirichlet vertex.
struct VolumeLocal {
  std::array<int, 3> dofs{};
  std::array<double, 9> matrix{};
};

/// Interface block of one fine edge of Gamma: consistency, symmetry and penalty terms.
/// Local unknowns 0..2 are the Omega_1 triangle's vertices, 3..5 the Omega_2 triangle's.
struct InterfaceLocal {
  std::array<int, 6> dofs{};
  std::array<double, 36> matrix{};
};

struct LocalForms {
  std::vector<VolumeLocal> omega1;
  std::vector<VolumeLocal> omega2;
  std::vector<InterfaceLocal> interface;  ///< indexed like DomainPartition::gamma_h
};

LocalForms compute_local_forms(const DomainPartition& partition, const ElementCoefficients& coeffs,
                               const DofLayout& layout, const PenaltyConfig& penalty,
                               Execution exec = Execution::Parallel);

/// Sums the volume terms over both subdomains; Dirichlet rows/columns are absent.
SparseMatrix assemble_volume_stiffness(const DomainPartition& partition,
                                       const ElementCoefficients& coeffs, const DofLayout& layout);

/// Interface terms of the given fine Gamma edges (all of Gamma when `gamma_subset` is empty).
SparseMatrix assemble_interface_terms(const DomainPartition& partition,
                                      const ElementCoefficients& coeffs, const DofLayout& layout,
                                      const PenaltyConfig& penalty,
                                      std::span<const int> gamma_subset = {});

/// The full interior-penalty form a_Omega on V_{h,h}.
SparseMatrix assemble_operator(const DomainPartition& partition, const ElementCoefficients& coeffs,
                               const DofLayout& layout, const PenaltyConfig& penalty,
                               Execution exec = Execution::Parallel);

/// Sum of local blocks in a fixed order (Omega_1 volumes, Omega_2 volumes, interface edges).
SparseMatrix assemble_from_locals(const LocalForms& locals, int size);

/// Exact P1 mass matrix on V_{h,h}.
SparseMatrix assemble_mass(const DomainPartition& partition, const DofLayout& layout);

using ScalarFunction = std::function<double(Point2)>;

/// Load (f, phi_i) with the vertex quadrature rule area/3 * sum f(v_k) per triangle.
Vector assemble_load_l2(const DomainPartition& partition, const DofLayout& layout,
                        const ScalarFunction& f);

struct Well {
  Point2 position;
  double rate = 0.0;    ///< q_j
  double radius = 0.0;  ///< r_w, only used by the well-bore pressure
};

/// Dirac load sum_j q_j phi_i(P_j). With a nonempty Omega_1, every well must lie strictly inside it;
/// on a partition without Omega_1 any interior point of the domain is accepted.
Vector assemble_load_dirac(const DomainPartition& partition, const DofLayout& layout,
                           std::span<const Well> wells);

/// Coordinate text export of the lower triangle: "i j value" with 17 significant digits.
void write_matrix_coordinate(std::ostream& out, const SparseMatrix& matrix);

}  // namespace felod
