#include "felod/dofs.hpp"

#include <stdexcept>

namespace felod {

namespace {

std::vector<int> number_free_vertices(const TriMesh& mesh, int& counter) {
  std::vector<int> dof(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.on_boundary[v]) dof[v] = counter++;
  }
  return dof;
}

// Barycentric coordinates of p in triangle t.
std::array<double, 3> barycentric(const TriMesh& mesh, int t, Point2 p) {
  const auto& tri = mesh.triangles[t];
  const Point2 a = mesh.vertices[tri[0]];
  const Point2 b = mesh.vertices[tri[1]];
  const Point2 c = mesh.vertices[tri[2]];
  const double area2 = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / area2;
  const double l2 = cross(b - a, p - a) / area2;
  return {1.0 - l1 - l2, l1, l2};
}

}  // namespace

DofLayout make_layout(const DomainPartition& partition, SpaceKind kind) {
  DofLayout layout;
  layout.kind = kind;
  int counter = 0;
  layout.omega1_dof = number_free_vertices(partition.fine_omega1, counter);
  layout.n_omega1 = counter;
  layout.omega2_dof = number_free_vertices(
      kind == SpaceKind::FineFine ? partition.fine_omega2 : partition.coarse_omega2, counter);
  layout.n_omega2 = counter - layout.n_omega1;
  return layout;
}

SparseMatrix prolongation(const DomainPartition& partition, const DofLayout& fine,
                          const DofLayout& coarse) {
  if (fine.kind != SpaceKind::FineFine || coarse.kind != SpaceKind::FineCoarse) {
    throw std::invalid_argument("prolongation maps V_{h,H} into V_{h,h}");
  }
  std::vector<Triplet> entries;
  for (int d : fine.omega1_dof) {
    if (d >= 0) entries.emplace_back(d, d, 1.0);
  }
  const TriMesh& f2 = partition.fine_omega2;
  const TriMesh& c2 = partition.coarse_omega2;
  std::vector<char> done(f2.num_vertices(), 0);
  for (int t = 0; t < f2.num_triangles(); ++t) {
    const int T = partition.parent[t];
    for (int v : f2.triangles[t]) {
      if (done[v] || fine.omega2_dof[v] < 0) continue;
      done[v] = 1;
      const auto lambda = barycentric(c2, T, f2.vertices[v]);
      for (int k = 0; k < 3; ++k) {
        const int z = coarse.omega2_dof[c2.triangles[T][k]];
        if (z >= 0 && lambda[k] > 1e-14) entries.emplace_back(fine.omega2_dof[v], z, lambda[k]);
      }
    }
  }
  SparseMatrix p(fine.size(), coarse.size());
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

Vector transfer_fine_function(const DomainPartition& from, const DofLayout& from_layout,
                              const Vector& values, const DomainPartition& to,
                              const DofLayout& to_layout) {
  if (from.n_fine != to.n_fine || from.domain != to.domain) {
    throw std::invalid_argument("transfer needs identical fine grids");
  }
  auto lookup = [&](int gid, bool prefer_omega1) {
    const int v1 = from.fine_omega1.grid_to_vertex.empty() ? -1 : from.fine_omega1.grid_to_vertex[gid];
    const int v2 = from.fine_omega2.grid_to_vertex[gid];
    const int d1 = v1 >= 0 ? from_layout.omega1_dof[v1] : -1;
    const int d2 = v2 >= 0 ? from_layout.omega2_dof[v2] : -1;
    const int d = prefer_omega1 ? (v1 >= 0 ? d1 : d2) : (v2 >= 0 ? d2 : d1);
    return d >= 0 ? values[d] : 0.0;
  };
  Vector out = Vector::Zero(to_layout.size());
  for (int v = 0; v < to.fine_omega1.num_vertices(); ++v) {
    if (const int d = to_layout.omega1_dof[v]; d >= 0)
      out[d] = lookup(to.fine_omega1.vertex_grid_id[v], true);
  }
  for (int v = 0; v < to.fine_omega2.num_vertices(); ++v) {
    if (const int d = to_layout.omega2_dof[v]; d >= 0)
      out[d] = lookup(to.fine_omega2.vertex_grid_id[v], false);
  }
  return out;
}

double evaluate_fine_function(const DomainPartition& partition, const DofLayout& layout,
                              const Vector& values, Point2 p) {
  const TriMesh* mesh = &partition.fine_omega1;
  const std::vector<int>* dofs = &layout.omega1_dof;
  int t = mesh->num_triangles() > 0 ? mesh->locate(p) : -1;
  if (t < 0) {
    mesh = &partition.fine_omega2;
    dofs = &layout.omega2_dof;
    t = mesh->locate(p);
  }
  if (t < 0) throw std::invalid_argument("evaluation point outside the domain");
  const auto lambda = barycentric(*mesh, t, p);
  double value = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int d = (*dofs)[mesh->triangles[t][k]];
    if (d >= 0) value += lambda[k] * values[d];
  }
  return value;
}

}  // namespace felod
