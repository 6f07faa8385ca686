#pragma once

#include <string>
#include <vector>

#include "felod/assembly.hpp"

namespace felod {

enum class RegionKind { Omega, Omega1, Omega2, Patch };

/// Part of the domain a norm is taken over. Regions are closed: the interface belongs to Omega,
/// Omega_1 and Omega_2; a patch owns the interface legs of its coarse elements.
struct Region {
  RegionKind kind = RegionKind::Omega;
  std::vector<int> coarse_elements;  ///< only for RegionKind::Patch

  static Region omega() { return {RegionKind::Omega, {}}; }
  static Region omega1() { return {RegionKind::Omega1, {}}; }
  static Region omega2() { return {RegionKind::Omega2, {}}; }
  static Region patch(std::vector<int> elements) { return {RegionKind::Patch, std::move(elements)}; }
};

std::string region_name(const Region& region);

/// ||A^{1/2} grad_h v|| over the region (broken gradient, no jump term).
double energy_seminorm(const DomainPartition& partition, const ElementCoefficients& coeffs,
                       const DofLayout& layout, const Vector& v, const Region& region);

/// ||[v]||_{L2(Gamma ∩ region)}.
double jump_norm(const DomainPartition& partition, const DofLayout& layout, const Vector& v,
                 const Region& region);

/// (||A^{1/2} grad_h v||^2 + gamma0/h ||[v]||^2)^{1/2}.
double norm_hh(const DomainPartition& partition, const ElementCoefficients& coeffs,
               const DofLayout& layout, const PenaltyConfig& penalty, const Vector& v,
               const Region& region);

/// As norm_hh with gamma0/H in place of gamma0/h.
double norm_hH(const DomainPartition& partition, const ElementCoefficients& coeffs,
               const DofLayout& layout, const PenaltyConfig& penalty, const Vector& v,
               const Region& region);

/// Diagnostic flux term (h/gamma0) ||{A grad_h v . n}||^2_Gamma of the full discrete energy norm.
double flux_term(const DomainPartition& partition, const ElementCoefficients& coeffs,
                 const DofLayout& layout, const PenaltyConfig& penalty, const Vector& v);

double l2_norm(const DomainPartition& partition, const DofLayout& layout, const Vector& v,
               const Region& region);

/// Largest vertex value magnitude over the region.
double linf_norm(const DomainPartition& partition, const DofLayout& layout, const Vector& v,
                 const Region& region);

struct RegionErrors {
  std::string region;
  double energy = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  bool absolute = false;  ///< set when a reference norm vanished and absolute errors are reported
};

struct ErrorReport {
  std::vector<RegionErrors> regions;

  const RegionErrors& at(const std::string& name) const;
};

/// Relative energy, L2 and max-norm errors of u_approx against u_ref, per region.
ErrorReport error_report(const DomainPartition& partition, const ElementCoefficients& coeffs,
                         const DofLayout& layout, const Vector& u_ref, const Vector& u_approx,
                         const std::vector<Region>& regions);

}  // namespace felod
