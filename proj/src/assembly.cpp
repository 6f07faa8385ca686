#include "felod/assembly.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace felod {

namespace {

std::array<Point2, 3> p1_gradients(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Point2 a = mesh.vertices[tri[0]];
  const Point2 b = mesh.vertices[tri[1]];
  const Point2 c = mesh.vertices[tri[2]];
  const double area2 = cross(b - a, c - a);
  return {Point2{(b.y - c.y) / area2, (c.x - b.x) / area2},
          Point2{(c.y - a.y) / area2, (a.x - c.x) / area2},
          Point2{(a.y - b.y) / area2, (b.x - a.x) / area2}};
}

VolumeLocal volume_local(const TriMesh& mesh, int t, double coeff, const std::vector<int>& dof_of) {
  VolumeLocal local;
  const auto grads = p1_gradients(mesh, t);
  const double scale = coeff * mesh.area(t);
  for (int i = 0; i < 3; ++i) {
    local.dofs[i] = dof_of[mesh.triangles[t][i]];
    for (int j = i; j < 3; ++j) {
      const double v = scale * dot(grads[i], grads[j]);
      local.matrix[i * 3 + j] = v;
      local.matrix[j * 3 + i] = v;
    }
  }
  return local;
}

// Barycentric weight of local vertex k of `tri` at edge point x, given the edge endpoints as
// mesh vertices (a vertex off the edge vanishes there).
double edge_trace(const std::array<int, 3>& tri, int k, const std::array<int, 2>& ends, double s) {
  if (tri[k] == ends[0]) return 1.0 - s;
  if (tri[k] == ends[1]) return s;
  return 0.0;
}

InterfaceLocal interface_local(const DomainPartition& p, const ElementCoefficients& coeffs,
                               const DofLayout& layout, const PenaltyConfig& penalty, int e) {
  const InterfaceEdge& edge = p.gamma_h[e];
  const auto& tri1 = p.fine_omega1.triangles[edge.tri1];
  const auto& tri2 = p.fine_omega2.triangles[edge.tri2];
  const auto g1 = p1_gradients(p.fine_omega1, edge.tri1);
  const auto g2 = p1_gradients(p.fine_omega2, edge.tri2);
  const double a1 = coeffs.omega1[edge.tri1];
  const double a2 = coeffs.omega2[edge.tri2];

  InterfaceLocal local;
  std::array<double, 6> flux{};  // {A grad(phi_k) . n}, constant on the edge
  for (int k = 0; k < 3; ++k) {
    local.dofs[k] = layout.omega1_dof[tri1[k]];
    local.dofs[k + 3] = layout.omega2_dof[tri2[k]];
    flux[k] = 0.5 * a1 * dot(g1[k], edge.normal);
    flux[k + 3] = 0.5 * a2 * dot(g2[k], edge.normal);
  }

  // Two-point Gauss rule on the edge; integrands have degree <= 2.
  const double offset = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> nodes{0.5 - offset, 0.5 + offset};
  const double weight = 0.5 * edge.length;
  const double sigma = penalty.gamma0 / penalty.h;
  std::array<std::array<double, 6>, 2> jump{};  // [phi_k] at each Gauss node
  for (int q = 0; q < 2; ++q) {
    for (int k = 0; k < 3; ++k) {
      jump[q][k] = edge_trace(tri1, k, edge.v1, nodes[q]);
      jump[q][k + 3] = -edge_trace(tri2, k, edge.v2, nodes[q]);
    }
  }
  for (int k = 0; k < 6; ++k) {
    for (int l = k; l < 6; ++l) {
      double v = 0.0;
      for (int q = 0; q < 2; ++q) {
        v += weight * (-flux[l] * jump[q][k] - jump[q][l] * flux[k] +
                       sigma * jump[q][l] * jump[q][k]);
      }
      local.matrix[k * 6 + l] = v;
      local.matrix[l * 6 + k] = v;
    }
  }
  return local;
}

template <std::size_t N>
void append_local(std::vector<Triplet>& out, const std::array<int, N>& dofs,
                  const std::array<double, N * N>& m) {
  for (std::size_t i = 0; i < N; ++i) {
    if (dofs[i] < 0) continue;
    for (std::size_t j = 0; j < N; ++j) {
      if (dofs[j] < 0 || m[i * N + j] == 0.0) continue;
      out.emplace_back(dofs[i], dofs[j], m[i * N + j]);
    }
  }
}

void require_fine_layout(const DomainPartition& p, const DofLayout& layout) {
  if (layout.kind != SpaceKind::FineFine ||
      layout.omega1_dof.size() != static_cast<std::size_t>(p.fine_omega1.num_vertices()) ||
      layout.omega2_dof.size() != static_cast<std::size_t>(p.fine_omega2.num_vertices())) {
    throw std::invalid_argument("layout does not describe V_{h,h} of this partition");
  }
}

}  // namespace

PenaltyConfig make_penalty(const DomainPartition& partition, double gamma0) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
  return {gamma0, partition.h()};
}

ElementCoefficients sample_partition(const CoefficientField& field, const DomainPartition& partition) {
  return {sample_per_element(field, partition.fine_omega1),
          sample_per_element(field, partition.fine_omega2)};
}

LocalForms compute_local_forms(const DomainPartition& partition, const ElementCoefficients& coeffs,
                               const DofLayout& layout, const PenaltyConfig& penalty,
                               Execution exec) {
  require_fine_layout(partition, layout);
  const TriMesh& f1 = partition.fine_omega1;
  const TriMesh& f2 = partition.fine_omega2;
  LocalForms forms;
  forms.omega1.resize(f1.num_triangles());
  forms.omega2.resize(f2.num_triangles());
  forms.interface.resize(partition.gamma_h.size());
  const int n1 = f1.num_triangles();
  const int n2 = f2.num_triangles();
  const int ne = static_cast<int>(partition.gamma_h.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel
    {
#pragma omp for schedule(static) nowait
      for (int t = 0; t < n1; ++t) forms.omega1[t] = volume_local(f1, t, coeffs.omega1[t], layout.omega1_dof);
#pragma omp for schedule(static) nowait
      for (int t = 0; t < n2; ++t) forms.omega2[t] = volume_local(f2, t, coeffs.omega2[t], layout.omega2_dof);
#pragma omp for schedule(static)
      for (int e = 0; e < ne; ++e) forms.interface[e] = interface_local(partition, coeffs, layout, penalty, e);
    }
  } else {
    for (int t = 0; t < n1; ++t) forms.omega1[t] = volume_local(f1, t, coeffs.omega1[t], layout.omega1_dof);
    for (int t = 0; t < n2; ++t) forms.omega2[t] = volume_local(f2, t, coeffs.omega2[t], layout.omega2_dof);
    for (int e = 0; e < ne; ++e) forms.interface[e] = interface_local(partition, coeffs, layout, penalty, e);
  }
  return forms;
}

SparseMatrix assemble_from_locals(const LocalForms& locals, int size) {
  std::vector<Triplet> entries;
  entries.reserve(9 * (locals.omega1.size() + locals.omega2.size()) + 36 * locals.interface.size());
  for (const auto& l : locals.omega1) append_local<3>(entries, l.dofs, l.matrix);
  for (const auto& l : locals.omega2) append_local<3>(entries, l.dofs, l.matrix);
  for (const auto& l : locals.interface) append_local<6>(entries, l.dofs, l.matrix);
  SparseMatrix m(size, size);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

SparseMatrix assemble_volume_stiffness(const DomainPartition& partition,
                                       const ElementCoefficients& coeffs, const DofLayout& layout) {
  require_fine_layout(partition, layout);
  LocalForms forms = compute_local_forms(partition, coeffs, layout, make_penalty(partition));
  forms.interface.clear();
  return assemble_from_locals(forms, layout.size());
}

SparseMatrix assemble_interface_terms(const DomainPartition& partition,
                                      const ElementCoefficients& coeffs, const DofLayout& layout,
                                      const PenaltyConfig& penalty, std::span<const int> gamma_subset) {
  require_fine_layout(partition, layout);
  LocalForms forms;
  const int ne = static_cast<int>(partition.gamma_h.size());
  if (gamma_subset.empty()) {
    for (int e = 0; e < ne; ++e) forms.interface.push_back(interface_local(partition, coeffs, layout, penalty, e));
  } else {
    for (int e : gamma_subset) {
      if (e < 0 || e >= ne) throw std::invalid_argument("edge is not a fine interface edge");
      forms.interface.push_back(interface_local(partition, coeffs, layout, penalty, e));
    }
  }
  return assemble_from_locals(forms, layout.size());
}

SparseMatrix assemble_operator(const DomainPartition& partition, const ElementCoefficients& coeffs,
                               const DofLayout& layout, const PenaltyConfig& penalty, Execution exec) {
  return assemble_from_locals(compute_local_forms(partition, coeffs, layout, penalty, exec),
                              layout.size());
}

SparseMatrix assemble_mass(const DomainPartition& partition, const DofLayout& layout) {
  require_fine_layout(partition, layout);
  std::vector<Triplet> entries;
  auto add_mesh = [&entries](const TriMesh& mesh, const std::vector<int>& dof_of) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const double a = mesh.area(t);
      for (int i = 0; i < 3; ++i) {
        const int di = dof_of[mesh.triangles[t][i]];
        if (di < 0) continue;
        for (int j = 0; j < 3; ++j) {
          const int dj = dof_of[mesh.triangles[t][j]];
          if (dj >= 0) entries.emplace_back(di, dj, a * (i == j ? 2.0 : 1.0) / 12.0);
        }
      }
    }
  };
  add_mesh(partition.fine_omega1, layout.omega1_dof);
  add_mesh(partition.fine_omega2, layout.omega2_dof);
  SparseMatrix m(layout.size(), layout.size());
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

Vector assemble_load_l2(const DomainPartition& partition, const DofLayout& layout,
                        const ScalarFunction& f) {
  require_fine_layout(partition, layout);
  Vector load = Vector::Zero(layout.size());
  auto add_mesh = [&](const TriMesh& mesh, const std::vector<int>& dof_of) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const double w = mesh.area(t) / 3.0;
      for (int v : mesh.triangles[t]) {
        if (dof_of[v] >= 0) load[dof_of[v]] += w * f(mesh.vertices[v]);
      }
    }
  };
  add_mesh(partition.fine_omega1, layout.omega1_dof);
  add_mesh(partition.fine_omega2, layout.omega2_dof);
  return load;
}

Vector assemble_load_dirac(const DomainPartition& partition, const DofLayout& layout,
                           std::span<const Well> wells) {
  require_fine_layout(partition, layout);
  Vector load = Vector::Zero(layout.size());
  const bool has_omega1 = partition.fine_omega1.num_triangles() > 0;
  for (const Well& w : wells) {
    const int t2 = partition.fine_omega2.locate(w.position);
    const int t1 = has_omega1 ? partition.fine_omega1.locate(w.position) : -1;
    const TriMesh* mesh = nullptr;
    const std::vector<int>* dof_of = nullptr;
    int t = -1;
    if (has_omega1) {
      if (t1 < 0 || t2 >= 0) throw std::invalid_argument("well must lie strictly inside Omega_1");
      mesh = &partition.fine_omega1;
      dof_of = &layout.omega1_dof;
      t = t1;
    } else {
      if (t2 < 0) throw std::invalid_argument("well lies outside the domain");
      mesh = &partition.fine_omega2;
      dof_of = &layout.omega2_dof;
      t = t2;
    }
    const auto& tri = mesh->triangles[t];
    const Point2 a = mesh->vertices[tri[0]];
    const Point2 b = mesh->vertices[tri[1]];
    const Point2 c = mesh->vertices[tri[2]];
    const double area2 = cross(b - a, c - a);
    const double l1 = cross(w.position - a, c - a) / area2;
    const double l2 = cross(b - a, w.position - a) / area2;
    const std::array<double, 3> lambda{1.0 - l1 - l2, l1, l2};
    for (int k = 0; k < 3; ++k) {
      const int d = (*dof_of)[tri[k]];
      if (d >= 0) load[d] += w.rate * lambda[k];
    }
  }
  return load;
}

void write_matrix_coordinate(std::ostream& out, const SparseMatrix& matrix) {
  out.precision(17);
  for (int col = 0; col < matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
      if (it.row() >= it.col()) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace felod
