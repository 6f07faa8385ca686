#include "felod/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace felod {

namespace {

enum class Leg { Bottom, Right, Left, Top };

struct LegInfo {
  Leg leg;
  int di, dj;          // offset of the cell across the leg
  bool across_lower;   // which triangle of that cell owns the shared edge
  Point2 normal;       // pointing from the neighbouring cell into this triangle
};

// Legs of the lower triangle (i,j),(i+1,j),(i+1,j+1) and of the upper one (i,j),(i+1,j+1),(i,j+1).
constexpr LegInfo kLowerLegs[2] = {{Leg::Bottom, 0, -1, false, {0.0, 1.0}},
                                   {Leg::Right, 1, 0, false, {-1.0, 0.0}}};
constexpr LegInfo kUpperLegs[2] = {{Leg::Left, -1, 0, true, {1.0, 0.0}},
                                   {Leg::Top, 0, 1, true, {0.0, -1.0}}};

std::array<std::array<int, 2>, 2> leg_grid_vertices(Leg leg, int i, int j) {
  switch (leg) {
    case Leg::Bottom: return {{{i, j}, {i + 1, j}}};
    case Leg::Right: return {{{i + 1, j}, {i + 1, j + 1}}};
    case Leg::Left: return {{{i, j}, {i, j + 1}}};
    case Leg::Top: return {{{i, j + 1}, {i + 1, j + 1}}};
  }
  return {};
}

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

}  // namespace

bool cell_in_domain(Domain domain, int n, int i, int j) {
  if (i < 0 || j < 0 || i >= n || j >= n) return false;
  if (domain == Domain::UnitSquare) return true;
  const double cx = (i + 0.5) / n;
  const double cy = (j + 0.5) / n;
  return !(cx > 0.5 && cy < 0.5);
}

int dyadic_cells(double size) {
  if (!(size > 0.0) || size > 1.0) throw std::invalid_argument("mesh size must lie in (0,1]");
  const double inv = 1.0 / size;
  const long n = std::lround(inv);
  if (std::abs(inv - static_cast<double>(n)) > 1e-9 * inv || n < 1 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("mesh size " + std::to_string(size) + " is not of the form 2^-k");
  }
  return static_cast<int>(n);
}

double TriMesh::area(int t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

Point2 TriMesh::barycenter(int t) const {
  const auto& tri = triangles[t];
  const Point2 s = vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]];
  return (1.0 / 3.0) * s;
}

int TriMesh::locate(Point2 p) const {
  constexpr double tol = 1e-12;
  const double gx = p.x * grid_n;
  const double gy = p.y * grid_n;
  const int i0 = static_cast<int>(std::floor(gx));
  const int j0 = static_cast<int>(std::floor(gy));
  // Candidate cells: the floor cell and its lower/left neighbours when p sits on a grid line.
  for (int cj : {j0, j0 - 1}) {
    for (int ci : {i0, i0 - 1}) {
      if (ci < 0 || cj < 0 || ci >= grid_n || cj >= grid_n) continue;
      const double u = gx - ci;
      const double v = gy - cj;
      if (u < -tol || u > 1 + tol || v < -tol || v > 1 + tol) continue;
      const int first = cell_to_triangle[cj * grid_n + ci];
      if (first < 0) continue;
      if (u >= v - tol) return first;
      return first + 1;
    }
  }
  return -1;
}

TriMesh build_grid_mesh(int n, const std::function<bool(int, int)>& keep,
                        const std::function<bool(int, int)>& in_domain) {
  if (n < 1) throw std::invalid_argument("grid resolution must be >= 1");
  TriMesh mesh;
  mesh.grid_n = n;
  mesh.grid_to_vertex.assign(static_cast<std::size_t>(n + 1) * (n + 1), -1);
  mesh.cell_to_triangle.assign(static_cast<std::size_t>(n) * n, -1);

  auto vertex = [&](int i, int j) {
    const int gid = j * (n + 1) + i;
    int& slot = mesh.grid_to_vertex[gid];
    if (slot < 0) {
      slot = mesh.num_vertices();
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      mesh.vertex_grid_id.push_back(gid);
      bool boundary = false;
      for (int cj = j - 1; cj <= j && !boundary; ++cj)
        for (int ci = i - 1; ci <= i && !boundary; ++ci) boundary = !in_domain(ci, cj);
      mesh.on_boundary.push_back(boundary ? 1 : 0);
    }
    return slot;
  };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!keep(i, j)) continue;
      const int v00 = vertex(i, j);
      const int v10 = vertex(i + 1, j);
      const int v11 = vertex(i + 1, j + 1);
      const int v01 = vertex(i, j + 1);
      mesh.cell_to_triangle[j * n + i] = mesh.num_triangles();
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
      mesh.triangle_cell.push_back(j * n + i);
      mesh.triangle_cell.push_back(j * n + i);
      mesh.lower.push_back(1);
      mesh.lower.push_back(0);
    }
  }

  std::unordered_map<long long, int> edge_index;
  edge_index.reserve(mesh.triangles.size() * 2);
  const long long nv = mesh.num_vertices();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.triangles[t][k];
      const int b = mesh.triangles[t][(k + 1) % 3];
      const long long key = std::min(a, b) * nv + std::max(a, b);
      auto [it, inserted] = edge_index.try_emplace(key, static_cast<int>(mesh.edges.size()));
      if (inserted) {
        mesh.edges.push_back({std::min(a, b), std::max(a, b), t, -1});
      } else {
        mesh.edges[it->second].t1 = t;
      }
    }
  }

  mesh.vertex_triangle_offsets.assign(mesh.num_vertices() + 1, 0);
  for (const auto& tri : mesh.triangles)
    for (int v : tri) ++mesh.vertex_triangle_offsets[v + 1];
  for (int v = 0; v < mesh.num_vertices(); ++v)
    mesh.vertex_triangle_offsets[v + 1] += mesh.vertex_triangle_offsets[v];
  mesh.vertex_triangle_list.resize(mesh.vertex_triangle_offsets.back());
  std::vector<int> fill(mesh.vertex_triangle_offsets.begin(), mesh.vertex_triangle_offsets.end() - 1);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int v : mesh.triangles[t]) mesh.vertex_triangle_list[fill[v]++] = t;
  return mesh;
}

TriMesh build_uniform_tri_mesh(Domain domain, int n) {
  if (n < 1) throw std::invalid_argument("subdivisions per unit must be >= 1");
  if (domain == Domain::LShape && n % 2 != 0) {
    throw std::invalid_argument("L-shaped domain needs an even number of subdivisions");
  }
  auto in = [domain, n](int i, int j) { return cell_in_domain(domain, n, i, j); };
  return build_grid_mesh(n, in, in);
}

bool Omega1Region::contains(Point2 p) const {
  return std::any_of(rects.begin(), rects.end(), [p](const Rect& r) { return r.contains_open(p); });
}

double DomainPartition::gamma_length() const {
  double total = 0.0;
  for (const auto& e : gamma_h) total += e.length;
  return total;
}

DomainPartition partition_domain(Domain domain, const Omega1Region& omega1, double H, double h) {
  return partition_domain(domain, omega1, dyadic_cells(H), dyadic_cells(h));
}

DomainPartition partition_domain(Domain domain, const Omega1Region& omega1, int n_coarse,
                                 int n_fine) {
  if (n_coarse < 1 || n_fine <= n_coarse || n_fine % n_coarse != 0) {
    throw std::invalid_argument("need h < H with the fine grid refining the coarse grid");
  }
  if (domain == Domain::LShape && n_coarse % 2 != 0) {
    throw std::invalid_argument("L-shaped domain needs the reentrant corner on the coarse grid");
  }
  for (const Rect& r : omega1.rects) {
    if (!(r.x1 > r.x0 && r.y1 > r.y0)) throw std::invalid_argument("degenerate Omega_1 rectangle");
    for (double c : {r.x0, r.x1, r.y0, r.y1}) {
      if (!near_integer(c * n_coarse)) {
        throw std::invalid_argument("Omega_1 is not aligned to the coarse grid");
      }
    }
  }

  DomainPartition p;
  p.domain = domain;
  p.n_coarse = n_coarse;
  p.n_fine = n_fine;
  p.omega1 = omega1;
  const int r = n_fine / n_coarse;

  std::vector<char> coarse_in_omega1(static_cast<std::size_t>(n_coarse) * n_coarse, 0);
  for (int J = 0; J < n_coarse; ++J) {
    for (int I = 0; I < n_coarse; ++I) {
      const Point2 c{(I + 0.5) / n_coarse, (J + 0.5) / n_coarse};
      if (!omega1.contains(c)) continue;
      if (!cell_in_domain(domain, n_coarse, I, J)) {
        throw std::invalid_argument("Omega_1 extends outside the domain");
      }
      coarse_in_omega1[J * n_coarse + I] = 1;
    }
  }
  auto coarse_omega1 = [&](int I, int J) {
    return I >= 0 && J >= 0 && I < n_coarse && J < n_coarse && coarse_in_omega1[J * n_coarse + I];
  };
  auto fine_domain = [&](int i, int j) { return cell_in_domain(domain, n_fine, i, j); };
  auto fine_omega1 = [&](int i, int j) {
    return fine_domain(i, j) && coarse_omega1(i / r, j / r);
  };
  auto fine_omega2 = [&](int i, int j) { return fine_domain(i, j) && !coarse_omega1(i / r, j / r); };
  auto coarse_domain = [&](int I, int J) { return cell_in_domain(domain, n_coarse, I, J); };
  auto coarse_omega2 = [&](int I, int J) { return coarse_domain(I, J) && !coarse_omega1(I, J); };

  p.fine_omega1 = build_grid_mesh(n_fine, fine_omega1, fine_domain);
  p.fine_omega2 = build_grid_mesh(n_fine, fine_omega2, fine_domain);
  p.coarse_omega2 = build_grid_mesh(n_coarse, coarse_omega2, coarse_domain);
  if (p.coarse_omega2.num_triangles() == 0) throw std::invalid_argument("Omega_2 is empty");

  const TriMesh& f2 = p.fine_omega2;
  const TriMesh& c2 = p.coarse_omega2;

  p.parent.resize(f2.num_triangles());
  p.children.assign(c2.num_triangles(), {});
  for (int t = 0; t < f2.num_triangles(); ++t) {
    const int cell = f2.triangle_cell[t];
    const int i = cell % n_fine;
    const int j = cell / n_fine;
    const int a = i % r;
    const int b = j % r;
    const bool coarse_lower = f2.is_lower(t) ? (a >= b) : (a > b);
    const int T = c2.cell_to_triangle[(j / r) * n_coarse + i / r] + (coarse_lower ? 0 : 1);
    p.parent[t] = T;
    p.children[T].push_back(t);
  }

  // Coarse interface segments, keyed by (coarse triangle, leg).
  p.segments_of.assign(c2.num_triangles(), {});
  std::unordered_map<long long, int> segment_key;
  for (int T = 0; T < c2.num_triangles(); ++T) {
    const int cell = c2.triangle_cell[T];
    const int I = cell % n_coarse;
    const int J = cell / n_coarse;
    for (const LegInfo& leg : (c2.is_lower(T) ? kLowerLegs : kUpperLegs)) {
      if (!coarse_omega1(I + leg.di, J + leg.dj)) continue;
      const auto gv = leg_grid_vertices(leg.leg, I, J);
      CoarseSegment seg;
      seg.coarse_tri = T;
      seg.a = {static_cast<double>(gv[0][0]) / n_coarse, static_cast<double>(gv[0][1]) / n_coarse};
      seg.b = {static_cast<double>(gv[1][0]) / n_coarse, static_cast<double>(gv[1][1]) / n_coarse};
      segment_key[static_cast<long long>(T) * 4 + static_cast<int>(leg.leg)] =
          static_cast<int>(p.gamma_H.size());
      p.segments_of[T].push_back(static_cast<int>(p.gamma_H.size()));
      p.gamma_H.push_back(std::move(seg));
    }
  }

  // Fine interface edges.
  const TriMesh& f1 = p.fine_omega1;
  p.fine_omega1_on_gamma.assign(f1.num_vertices(), 0);
  p.fine_omega2_on_gamma.assign(f2.num_vertices(), 0);
  for (int t = 0; t < f2.num_triangles(); ++t) {
    const int cell = f2.triangle_cell[t];
    const int i = cell % n_fine;
    const int j = cell / n_fine;
    for (const LegInfo& leg : (f2.is_lower(t) ? kLowerLegs : kUpperLegs)) {
      const int ni = i + leg.di;
      const int nj = j + leg.dj;
      if (!fine_omega1(ni, nj)) continue;
      InterfaceEdge e;
      e.tri2 = t;
      e.tri1 = f1.cell_to_triangle[nj * n_fine + ni] + (leg.across_lower ? 0 : 1);
      const auto gv = leg_grid_vertices(leg.leg, i, j);
      for (int k = 0; k < 2; ++k) {
        const int gid = gv[k][1] * (n_fine + 1) + gv[k][0];
        e.v1[k] = f1.grid_to_vertex[gid];
        e.v2[k] = f2.grid_to_vertex[gid];
        p.fine_omega1_on_gamma[e.v1[k]] = 1;
        p.fine_omega2_on_gamma[e.v2[k]] = 1;
      }
      e.a = f2.vertices[e.v2[0]];
      e.b = f2.vertices[e.v2[1]];
      e.length = norm(e.b - e.a);
      e.normal = leg.normal;
      const auto it = segment_key.find(static_cast<long long>(p.parent[t]) * 4 +
                                       static_cast<int>(leg.leg));
      if (it == segment_key.end()) throw std::logic_error("fine interface edge without coarse segment");
      e.coarse_segment = it->second;
      p.gamma_H[e.coarse_segment].fine_edges.push_back(static_cast<int>(p.gamma_h.size()));
      p.gamma_h.push_back(e);
    }
  }
  return p;
}

Patch element_patch(const DomainPartition& partition, int T, int L) {
  const TriMesh& c2 = partition.coarse_omega2;
  if (T < 0 || T >= c2.num_triangles()) throw std::out_of_range("coarse element index out of range");
  if (L < 0) throw std::invalid_argument("patch level must be nonnegative");
  std::vector<char> in_patch(c2.num_triangles(), 0);
  std::vector<int> current{T};
  in_patch[T] = 1;
  for (int level = 0; level < L; ++level) {
    std::vector<char> vertex_seen(c2.num_vertices(), 0);
    std::vector<int> grown = current;
    for (int e : current) {
      for (int v : c2.triangles[e]) {
        if (vertex_seen[v]) continue;
        vertex_seen[v] = 1;
        for (int k = c2.vertex_triangle_offsets[v]; k < c2.vertex_triangle_offsets[v + 1]; ++k) {
          const int nb = c2.vertex_triangle_list[k];
          if (!in_patch[nb]) {
            in_patch[nb] = 1;
            grown.push_back(nb);
          }
        }
      }
    }
    if (grown.size() == current.size()) break;
    current = std::move(grown);
  }
  std::sort(current.begin(), current.end());
  return {T, L, std::move(current)};
}

CombinedElement combined_element(const DomainPartition& partition, int T) {
  if (T < 0 || T >= partition.coarse_omega2.num_triangles()) {
    throw std::out_of_range("coarse element index out of range");
  }
  if (partition.segments_of[T].empty()) {
    throw std::invalid_argument("coarse element does not meet the interface");
  }
  CombinedElement ce;
  ce.coarse_element = T;
  ce.gamma_segments = partition.segments_of[T];
  for (int s : ce.gamma_segments) {
    for (int e : partition.gamma_H[s].fine_edges) {
      ce.gamma_edges.push_back(e);
      ce.fine_omega1_elements.push_back(partition.gamma_h[e].tri1);
    }
  }
  std::sort(ce.fine_omega1_elements.begin(), ce.fine_omega1_elements.end());
  ce.fine_omega1_elements.erase(
      std::unique(ce.fine_omega1_elements.begin(), ce.fine_omega1_elements.end()),
      ce.fine_omega1_elements.end());
  return ce;
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  out.precision(17);
  for (const Point2& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << '\n';
  for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_partition(std::ostream& out, const DomainPartition& partition) {
  const TriMesh& f1 = partition.fine_omega1;
  const TriMesh& f2 = partition.fine_omega2;
  // Omega_1 vertices first, then Omega_2 vertices; interface vertices appear once per side.
  const int offset = f1.num_vertices();
  out.precision(17);
  for (const Point2& v : f1.vertices) out << "v " << v.x << ' ' << v.y << '\n';
  for (const Point2& v : f2.vertices) out << "v " << v.x << ' ' << v.y << '\n';
  for (const auto& t : f1.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& t : f2.triangles) {
    out << "t " << t[0] + offset << ' ' << t[1] + offset << ' ' << t[2] + offset << '\n';
  }
  for (const InterfaceEdge& e : partition.gamma_h) {
    // The normal points into Omega_2, so Omega_2 lies left of a->b iff cross(b-a, n) > 0.
    const int side = cross(e.b - e.a, e.normal) > 0.0 ? 2 : 1;
    out << "g " << e.v2[0] + offset << ' ' << e.v2[1] + offset << ' ' << side << '\n';
  }
}

}  // namespace felod
