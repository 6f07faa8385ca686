#include "felod/transfer.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <stdexcept>

namespace felod {

namespace {

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

ClementWeights build_clement_weights(const DomainPartition& partition, const DofLayout& fine,
                                     const DofLayout& coarse) {
  if (fine.kind != SpaceKind::FineFine || coarse.kind != SpaceKind::FineCoarse) {
    throw std::invalid_argument("Clément weights need the V_{h,h} and V_{h,H} layouts");
  }
  const TriMesh& f2 = partition.fine_omega2;
  const TriMesh& c2 = partition.coarse_omega2;
  ClementWeights w;
  w.node.assign(coarse.n_omega2, -1);
  for (int z = 0; z < c2.num_vertices(); ++z) {
    if (const int d = coarse.omega2_dof[z]; d >= 0) w.node[d - coarse.n_omega1] = z;
  }
  w.denominators = Vector::Zero(coarse.n_omega2);
  std::vector<Triplet> entries;
  for (int t = 0; t < f2.num_triangles(); ++t) {
    const int T = partition.parent[t];
    const auto& tri = f2.triangles[t];
    const double area = f2.area(t);
    for (int k = 0; k < 3; ++k) {  // coarse vertex k of T
      const int d = coarse.omega2_dof[c2.triangles[T][k]];
      if (d < 0) continue;
      const int row = d - coarse.n_omega1;
      std::array<double, 3> phi{};  // Phi_z at the fine vertices
      for (int m = 0; m < 3; ++m) phi[m] = barycentric(c2, T, f2.vertices[tri[m]])[k];
      const double sum = phi[0] + phi[1] + phi[2];
      w.denominators[row] += area / 3.0 * sum;
      for (int i = 0; i < 3; ++i) {
        const int col = fine.omega2_dof[tri[i]];
        if (col < 0) continue;
        const double v = area / 12.0 * (sum + phi[i]);
        if (v != 0.0) entries.emplace_back(row, col, v);
      }
    }
  }
  w.pairing.resize(coarse.n_omega2, fine.size());
  w.pairing.setFromTriplets(entries.begin(), entries.end());
  return w;
}

Vector clement_interpolate(const ClementWeights& weights, const Vector& v_fine) {
  return (weights.pairing * v_fine).cwiseQuotient(weights.denominators);
}

Vector l2_project_fine(const Vector& v_omega1) { return v_omega1; }

Vector l2_project_fine(const DomainPartition& partition, const DofLayout& fine,
                       const ScalarFunction& f) {
  const TriMesh& m = partition.fine_omega1;
  std::vector<Triplet> mass;
  Vector load = Vector::Zero(fine.n_omega1);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const double area = m.area(t);
    // Mid-edge rule: each midpoint carries weight area/3, where phi_i takes the value 1/2 on the
    // two edges through vertex i.
    std::array<double, 3> fm{};
    for (int k = 0; k < 3; ++k) {
      fm[k] = f(0.5 * (m.vertices[tri[(k + 1) % 3]] + m.vertices[tri[(k + 2) % 3]]));
    }
    for (int i = 0; i < 3; ++i) {
      const int di = fine.omega1_dof[tri[i]];
      if (di < 0) continue;
      load[di] += area / 6.0 * (fm[(i + 1) % 3] + fm[(i + 2) % 3]);
      for (int j = 0; j < 3; ++j) {
        const int dj = fine.omega1_dof[tri[j]];
        if (dj >= 0) mass.emplace_back(di, dj, area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  SparseMatrix mm(fine.n_omega1, fine.n_omega1);
  mm.setFromTriplets(mass.begin(), mass.end());
  Eigen::SimplicialLLT<SparseMatrix> llt(mm);
  if (llt.info() != Eigen::Success) throw std::runtime_error("Omega_1 mass matrix factorization failed");
  return llt.solve(load);
}

Vector apply_C_hH(const ClementWeights& weights, const DofLayout& fine, const DofLayout& coarse,
                  const Vector& v) {
  if (v.size() != fine.size()) throw std::invalid_argument("apply_C_hH needs a V_{h,h} vector");
  Vector out(coarse.size());
  out.head(coarse.n_omega1) = l2_project_fine(Vector(v.head(fine.n_omega1)));
  out.tail(coarse.n_omega2) = clement_interpolate(weights, v);
  return out;
}

SparseMatrix ConstraintMatrix::normalized() const {
  SparseMatrix out = entries;
  for (int k = 0; k < out.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(out, k); it; ++it) it.valueRef() /= denominators[it.row()];
  }
  return out;
}

std::vector<int> patch_unknowns(const DomainPartition& partition, const DofLayout& fine,
                                const Patch& patch) {
  const TriMesh& f2 = partition.fine_omega2;
  std::vector<char> in_patch(partition.coarse_omega2.num_triangles(), 0);
  for (int T : patch.elements) in_patch[T] = 1;
  std::vector<int> out;
  for (int v = 0; v < f2.num_vertices(); ++v) {
    if (fine.omega2_dof[v] < 0) continue;
    bool inside = true;
    for (int k = f2.vertex_triangle_offsets[v]; k < f2.vertex_triangle_offsets[v + 1]; ++k) {
      if (!in_patch[partition.parent[f2.vertex_triangle_list[k]]]) {
        inside = false;
        break;
      }
    }
    if (inside) out.push_back(fine.omega2_dof[v]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ConstraintMatrix constraint_rows(const DomainPartition& partition, const DofLayout& fine,
                                 const ClementWeights& weights, const Patch* patch) {
  ConstraintMatrix c;
  std::vector<int> candidate_rows;
  if (patch == nullptr) {
    for (int d = fine.n_omega1; d < fine.size(); ++d) c.columns.push_back(d);
    for (int r = 0; r < weights.rows(); ++r) candidate_rows.push_back(r);
  } else {
    c.columns = patch_unknowns(partition, fine, *patch);
    std::vector<int> row_of_node(partition.coarse_omega2.num_vertices(), -1);
    for (int r = 0; r < weights.rows(); ++r) row_of_node[weights.node[r]] = r;
    std::vector<char> seen(weights.rows(), 0);
    for (int T : patch->elements) {
      for (int z : partition.coarse_omega2.triangles[T]) {
        const int r = row_of_node[z];
        if (r >= 0 && !seen[r]) {
          seen[r] = 1;
          candidate_rows.push_back(r);
        }
      }
    }
    std::sort(candidate_rows.begin(), candidate_rows.end());
  }

  std::vector<int> col_index(fine.size(), -1);
  for (std::size_t j = 0; j < c.columns.size(); ++j) col_index[c.columns[j]] = static_cast<int>(j);
  std::vector<int> row_index(weights.rows(), -1);
  for (std::size_t i = 0; i < candidate_rows.size(); ++i) row_index[candidate_rows[i]] = static_cast<int>(i);

  std::vector<Triplet> entries;
  std::vector<char> nonzero(candidate_rows.size(), 0);
  for (int d : c.columns) {
    for (SparseMatrix::InnerIterator it(weights.pairing, d); it; ++it) {
      const int ri = row_index[it.row()];
      if (ri < 0) continue;
      entries.emplace_back(ri, col_index[d], it.value());
      nonzero[ri] = 1;
    }
  }
  std::vector<int> compact(candidate_rows.size(), -1);
  for (std::size_t i = 0; i < candidate_rows.size(); ++i) {
    if (!nonzero[i] && patch != nullptr) continue;
    compact[i] = static_cast<int>(c.rows.size());
    c.rows.push_back(candidate_rows[i]);
  }
  for (auto& e : entries) e = Triplet(compact[e.row()], e.col(), e.value());
  c.entries.resize(static_cast<int>(c.rows.size()), static_cast<int>(c.columns.size()));
  c.entries.setFromTriplets(entries.begin(), entries.end());
  c.denominators.resize(static_cast<int>(c.rows.size()));
  for (std::size_t i = 0; i < c.rows.size(); ++i) c.denominators[i] = weights.denominators[c.rows[i]];
  return c;
}

}  // namespace felod
