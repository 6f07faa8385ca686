#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "felod/geometry.hpp"

namespace felod {

enum class Domain {
  UnitSquare,  ///< (0,1)^2
  LShape,      ///< (0,1)^2 minus (1/2,1)x(0,1/2)
};

/// Whether the grid cell (i,j) of an n x n grid over the unit square belongs to the domain.
bool cell_in_domain(Domain domain, int n, int i, int j);

/// Number of cells per unit length for a dyadic mesh size 2^-k; throws for non-dyadic sizes.
int dyadic_cells(double size);

struct MeshEdge {
  int v0 = -1;
  int v1 = -1;
  int t0 = -1;  ///< first adjacent triangle
  int t1 = -1;  ///< second adjacent triangle, -1 on the mesh boundary
};

/// Structured triangulation: square cells of size 1/grid_n split along the (i,j)-(i+1,j+1) diagonal.
///
/// Cells are visited row by row (j outer, i inner); each cell contributes the triangle below the
/// diagonal, (i,j),(i+1,j),(i+1,j+1), then the one above it, (i,j),(i+1,j+1),(i,j+1).
/// Vertices are numbered in order of first appearance, so identical inputs give identical numbering.
struct TriMesh {
  int grid_n = 0;
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> on_boundary;        ///< vertex lies on the outer boundary of the domain
  std::vector<int> vertex_grid_id;      ///< j*(grid_n+1)+i of each vertex
  std::vector<int> grid_to_vertex;      ///< inverse of vertex_grid_id, -1 where absent
  std::vector<int> triangle_cell;       ///< j*grid_n+i of the cell holding each triangle
  std::vector<char> lower;              ///< per triangle: below the cell diagonal
  std::vector<int> cell_to_triangle;    ///< first (lower) triangle of each cell, -1 where absent
  std::vector<MeshEdge> edges;
  std::vector<int> vertex_triangle_offsets;  ///< CSR: triangles around each vertex
  std::vector<int> vertex_triangle_list;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double area(int t) const;
  Point2 barycenter(int t) const;
  /// True for the triangle below the cell diagonal.
  bool is_lower(int t) const { return lower[t] != 0; }
  /// Triangle containing p (closed), or -1.
  int locate(Point2 p) const;
  /// Triangles sharing vertex v.
  std::vector<int> triangles_around(int v) const {
    return {vertex_triangle_list.begin() + vertex_triangle_offsets[v],
            vertex_triangle_list.begin() + vertex_triangle_offsets[v + 1]};
  }
};

/// Builds the mesh of the cells selected by `keep` on an n x n grid; `in_domain` decides which
/// vertices count as outer boundary (a vertex is on the boundary when any of its four surrounding
/// cells lies outside the domain).
TriMesh build_grid_mesh(int n, const std::function<bool(int, int)>& keep,
                        const std::function<bool(int, int)>& in_domain);

TriMesh build_uniform_tri_mesh(Domain domain, int n);

/// Union of axis-aligned rectangles marking the fine-only subdomain.
struct Omega1Region {
  std::vector<Rect> rects;

  bool empty() const { return rects.empty(); }
  /// Open-set membership of a point (cell centers are tested with this).
  bool contains(Point2 p) const;
};

/// One fine interface edge with its Omega_1-side and Omega_2-side triangles.
struct InterfaceEdge {
  int tri1 = -1;                 ///< triangle of fine_omega1
  int tri2 = -1;                 ///< triangle of fine_omega2
  std::array<int, 2> v1{};       ///< endpoints as fine_omega1 vertices
  std::array<int, 2> v2{};       ///< the same endpoints as fine_omega2 vertices
  Point2 a;
  Point2 b;
  Point2 normal;                 ///< unit normal pointing from Omega_1 into Omega_2
  double length = 0.0;
  int coarse_segment = -1;       ///< index into DomainPartition::gamma_H
};

/// One coarse interface segment: a leg of a coarse Omega_2 triangle lying on Gamma.
struct CoarseSegment {
  int coarse_tri = -1;
  Point2 a;
  Point2 b;
  std::vector<int> fine_edges;  ///< indices into gamma_h tiling this segment
};

struct DomainPartition {
  Domain domain = Domain::UnitSquare;
  int n_coarse = 0;  ///< 1/H
  int n_fine = 0;    ///< 1/h
  Omega1Region omega1;
  TriMesh fine_omega1;
  TriMesh fine_omega2;
  TriMesh coarse_omega2;
  std::vector<InterfaceEdge> gamma_h;
  std::vector<CoarseSegment> gamma_H;
  std::vector<int> parent;                        ///< fine_omega2 triangle -> coarse_omega2 triangle
  std::vector<std::vector<int>> children;         ///< coarse triangle -> fine_omega2 triangles
  std::vector<std::vector<int>> segments_of;      ///< coarse triangle -> indices into gamma_H
  std::vector<char> fine_omega1_on_gamma;         ///< per fine_omega1 vertex
  std::vector<char> fine_omega2_on_gamma;         ///< per fine_omega2 vertex

  double H() const { return 1.0 / n_coarse; }
  double h() const { return 1.0 / n_fine; }
  int ratio() const { return n_fine / n_coarse; }
  bool has_interface() const { return !gamma_h.empty(); }
  /// Total length of Gamma.
  double gamma_length() const;
};

DomainPartition partition_domain(Domain domain, const Omega1Region& omega1, double H, double h);
DomainPartition partition_domain(Domain domain, const Omega1Region& omega1, int n_coarse, int n_fine);

struct Patch {
  int seed_element = -1;
  int level = 0;
  std::vector<int> elements;  ///< sorted coarse_omega2 triangle indices
};

/// L-fold vertex-adjacency closure of coarse element T within the coarse Omega_2 mesh.
Patch element_patch(const DomainPartition& partition, int T, int L);

struct CombinedElement {
  int coarse_element = -1;
  std::vector<int> fine_omega1_elements;  ///< fine_omega1 triangles attached along T's interface legs
  std::vector<int> gamma_segments;        ///< indices into gamma_H, i.e. T ∩ Gamma
  std::vector<int> gamma_edges;           ///< fine interface edges inside T ∩ Gamma
};

CombinedElement combined_element(const DomainPartition& partition, int T);

/// Plain-text export: "v x y" per vertex and "t i j k" per triangle.
void write_mesh(std::ostream& out, const TriMesh& mesh);

/// Exports the fine mesh of the whole domain (Omega_1 triangles first) plus one "g i j side" line
/// per fine interface edge, where side (1 or 2) names the subdomain left of the directed edge i->j.
/// Vertex indices are positions in the exported vertex list.
void write_partition(std::ostream& out, const DomainPartition& partition);

}  // namespace felod
