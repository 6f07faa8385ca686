#include "felod/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace felod {

namespace {

struct RegionMask {
  bool omega1 = false;
  std::vector<char> omega2_tri;  // fine Omega_2 triangles in the region
  std::vector<char> gamma_edge;  // fine interface edges in the region
};

RegionMask make_mask(const DomainPartition& p, const Region& region) {
  RegionMask mask;
  const int n2 = p.fine_omega2.num_triangles();
  const int ne = static_cast<int>(p.gamma_h.size());
  switch (region.kind) {
    case RegionKind::Omega:
      mask.omega1 = true;
      mask.omega2_tri.assign(n2, 1);
      mask.gamma_edge.assign(ne, 1);
      break;
    case RegionKind::Omega1:
      mask.omega1 = true;
      mask.omega2_tri.assign(n2, 0);
      mask.gamma_edge.assign(ne, 1);
      break;
    case RegionKind::Omega2:
      mask.omega2_tri.assign(n2, 1);
      mask.gamma_edge.assign(ne, 1);
      break;
    case RegionKind::Patch: {
      std::vector<char> coarse(p.coarse_omega2.num_triangles(), 0);
      for (int T : region.coarse_elements) coarse.at(T) = 1;
      mask.omega2_tri.resize(n2);
      for (int t = 0; t < n2; ++t) mask.omega2_tri[t] = coarse[p.parent[t]];
      mask.gamma_edge.resize(ne);
      for (int e = 0; e < ne; ++e) {
        mask.gamma_edge[e] = coarse[p.gamma_H[p.gamma_h[e].coarse_segment].coarse_tri];
      }
      break;
    }
  }
  return mask;
}

double value(const Vector& v, int dof) { return dof >= 0 ? v[dof] : 0.0; }

double mesh_energy2(const TriMesh& mesh, const std::vector<double>& coeff,
                    const std::vector<int>& dof_of, const Vector& v, const std::vector<char>* keep) {
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (keep && !(*keep)[t]) continue;
    const auto& tri = mesh.triangles[t];
    const Point2 a = mesh.vertices[tri[0]];
    const Point2 b = mesh.vertices[tri[1]];
    const Point2 c = mesh.vertices[tri[2]];
    const double area2 = cross(b - a, c - a);
    const double u0 = value(v, dof_of[tri[0]]);
    const double u1 = value(v, dof_of[tri[1]]);
    const double u2 = value(v, dof_of[tri[2]]);
    const double gx = (u0 * (b.y - c.y) + u1 * (c.y - a.y) + u2 * (a.y - b.y)) / area2;
    const double gy = (u0 * (c.x - b.x) + u1 * (a.x - c.x) + u2 * (b.x - a.x)) / area2;
    sum += coeff[t] * 0.5 * area2 * (gx * gx + gy * gy);
  }
  return sum;
}

double mesh_l2sq(const TriMesh& mesh, const std::vector<int>& dof_of, const Vector& v,
                 const std::vector<char>* keep) {
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (keep && !(*keep)[t]) continue;
    const auto& tri = mesh.triangles[t];
    const double u0 = value(v, dof_of[tri[0]]);
    const double u1 = value(v, dof_of[tri[1]]);
    const double u2 = value(v, dof_of[tri[2]]);
    const double s = u0 + u1 + u2;
    sum += mesh.area(t) / 12.0 * (s * s + u0 * u0 + u1 * u1 + u2 * u2);
  }
  return sum;
}

double jump2(const DomainPartition& p, const DofLayout& layout, const Vector& v,
             const RegionMask& mask) {
  double sum = 0.0;
  for (std::size_t e = 0; e < p.gamma_h.size(); ++e) {
    if (!mask.gamma_edge[e]) continue;
    const InterfaceEdge& edge = p.gamma_h[e];
    const double ja = value(v, layout.omega1_dof[edge.v1[0]]) - value(v, layout.omega2_dof[edge.v2[0]]);
    const double jb = value(v, layout.omega1_dof[edge.v1[1]]) - value(v, layout.omega2_dof[edge.v2[1]]);
    sum += edge.length / 3.0 * (ja * ja + ja * jb + jb * jb);
  }
  return sum;
}

double energy2(const DomainPartition& p, const ElementCoefficients& coeffs, const DofLayout& layout,
               const Vector& v, const RegionMask& mask) {
  double sum = mesh_energy2(p.fine_omega2, coeffs.omega2, layout.omega2_dof, v, &mask.omega2_tri);
  if (mask.omega1) sum += mesh_energy2(p.fine_omega1, coeffs.omega1, layout.omega1_dof, v, nullptr);
  return sum;
}

}  // namespace

std::string region_name(const Region& region) {
  switch (region.kind) {
    case RegionKind::Omega: return "omega";
    case RegionKind::Omega1: return "omega1";
    case RegionKind::Omega2: return "omega2";
    case RegionKind::Patch: return "patch";
  }
  return "unknown";
}

double energy_seminorm(const DomainPartition& partition, const ElementCoefficients& coeffs,
                       const DofLayout& layout, const Vector& v, const Region& region) {
  return std::sqrt(energy2(partition, coeffs, layout, v, make_mask(partition, region)));
}

double jump_norm(const DomainPartition& partition, const DofLayout& layout, const Vector& v,
                 const Region& region) {
  return std::sqrt(jump2(partition, layout, v, make_mask(partition, region)));
}

double norm_hh(const DomainPartition& partition, const ElementCoefficients& coeffs,
               const DofLayout& layout, const PenaltyConfig& penalty, const Vector& v,
               const Region& region) {
  const RegionMask mask = make_mask(partition, region);
  return std::sqrt(energy2(partition, coeffs, layout, v, mask) +
                   penalty.gamma0 / penalty.h * jump2(partition, layout, v, mask));
}

double norm_hH(const DomainPartition& partition, const ElementCoefficients& coeffs,
               const DofLayout& layout, const PenaltyConfig& penalty, const Vector& v,
               const Region& region) {
  const RegionMask mask = make_mask(partition, region);
  return std::sqrt(energy2(partition, coeffs, layout, v, mask) +
                   penalty.gamma0 / partition.H() * jump2(partition, layout, v, mask));
}

double flux_term(const DomainPartition& partition, const ElementCoefficients& coeffs,
                 const DofLayout& layout, const PenaltyConfig& penalty, const Vector& v) {
  double sum = 0.0;
  for (const InterfaceEdge& edge : partition.gamma_h) {
    double flux = 0.0;
    auto side = [&](const TriMesh& mesh, int t, const std::vector<int>& dof_of, double a) {
      const auto& tri = mesh.triangles[t];
      const Point2 p0 = mesh.vertices[tri[0]];
      const Point2 p1 = mesh.vertices[tri[1]];
      const Point2 p2 = mesh.vertices[tri[2]];
      const double area2 = cross(p1 - p0, p2 - p0);
      const double u0 = value(v, dof_of[tri[0]]);
      const double u1 = value(v, dof_of[tri[1]]);
      const double u2 = value(v, dof_of[tri[2]]);
      const Point2 g{(u0 * (p1.y - p2.y) + u1 * (p2.y - p0.y) + u2 * (p0.y - p1.y)) / area2,
                     (u0 * (p2.x - p1.x) + u1 * (p0.x - p2.x) + u2 * (p1.x - p0.x)) / area2};
      flux += 0.5 * a * dot(g, edge.normal);
    };
    side(partition.fine_omega1, edge.tri1, layout.omega1_dof, coeffs.omega1[edge.tri1]);
    side(partition.fine_omega2, edge.tri2, layout.omega2_dof, coeffs.omega2[edge.tri2]);
    sum += edge.length * flux * flux;
  }
  return penalty.h / penalty.gamma0 * sum;
}

double l2_norm(const DomainPartition& partition, const DofLayout& layout, const Vector& v,
               const Region& region) {
  const RegionMask mask = make_mask(partition, region);
  double sum = mesh_l2sq(partition.fine_omega2, layout.omega2_dof, v, &mask.omega2_tri);
  if (mask.omega1) sum += mesh_l2sq(partition.fine_omega1, layout.omega1_dof, v, nullptr);
  return std::sqrt(sum);
}

double linf_norm(const DomainPartition& partition, const DofLayout& layout, const Vector& v,
                 const Region& region) {
  const RegionMask mask = make_mask(partition, region);
  double m = 0.0;
  if (mask.omega1) {
    for (int d : layout.omega1_dof) m = std::max(m, std::abs(value(v, d)));
  }
  const TriMesh& f2 = partition.fine_omega2;
  for (int t = 0; t < f2.num_triangles(); ++t) {
    if (!mask.omega2_tri[t]) continue;
    for (int vtx : f2.triangles[t]) m = std::max(m, std::abs(value(v, layout.omega2_dof[vtx])));
  }
  return m;
}

const RegionErrors& ErrorReport::at(const std::string& name) const {
  for (const auto& r : regions) {
    if (r.region == name) return r;
  }
  throw std::out_of_range("no errors recorded for region " + name);
}

ErrorReport error_report(const DomainPartition& partition, const ElementCoefficients& coeffs,
                         const DofLayout& layout, const Vector& u_ref, const Vector& u_approx,
                         const std::vector<Region>& regions) {
  if (u_ref.size() != layout.size() || u_approx.size() != layout.size()) {
    throw std::invalid_argument("error_report needs V_{h,h} coefficient vectors");
  }
  const Vector diff = u_approx - u_ref;
  ErrorReport report;
  for (const Region& region : regions) {
    RegionErrors r;
    r.region = region_name(region);
    const double ref_e = energy_seminorm(partition, coeffs, layout, u_ref, region);
    const double ref_l2 = l2_norm(partition, layout, u_ref, region);
    const double ref_inf = linf_norm(partition, layout, u_ref, region);
    r.energy = energy_seminorm(partition, coeffs, layout, diff, region);
    r.l2 = l2_norm(partition, layout, diff, region);
    r.linf = linf_norm(partition, layout, diff, region);
    if (ref_e > 0.0 && ref_l2 > 0.0 && ref_inf > 0.0) {
      r.energy /= ref_e;
      r.l2 /= ref_l2;
      r.linf /= ref_inf;
    } else {
      r.absolute = true;
    }
    report.regions.push_back(std::move(r));
  }
  return report;
}

}  // namespace felod
