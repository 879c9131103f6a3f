#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace mixedreg::fem {

/// Boundary facet (edge in 2D, triangle in 3D) of a simplicial mesh.
struct BoundaryFacet {
  std::vector<int> vertices;
  /// The single cell containing the facet.
  int cell = -1;
  /// Bit c set: component c is constrained (Dirichlet) on this facet.
  std::uint32_t dirichlet = 0;
  /// Geometric origin: loop/slit edge index in 2D, cube face 0..5 in 3D.
  int label = -1;
};

template <int Dim>
struct Mesh {
  static_assert(Dim == 2 || Dim == 3, "Mesh: dimension must be 2 or 3");
  static constexpr int dim = Dim;
  static constexpr int cell_size = Dim + 1;
  using Point = Eigen::Matrix<double, Dim, 1>;
  using Cell = std::array<int, Dim + 1>;

  std::vector<Point> vertices;
  std::vector<Cell> cells;
  std::vector<BoundaryFacet> boundary;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_cells() const { return cells.size(); }

  /// Signed volume (area in 2D) of a cell.
  double signed_volume(std::size_t c) const {
    Eigen::Matrix<double, Dim, Dim> j;
    for (int k = 0; k < Dim; ++k) j.col(k) = vertices[cells[c][k + 1]] - vertices[cells[c][0]];
    return j.determinant() / (Dim == 2 ? 2.0 : 6.0);
  }
  double volume(std::size_t c) const { return std::abs(signed_volume(c)); }

  double cell_diameter(std::size_t c) const {
    double d = 0.0;
    for (int a = 0; a < cell_size; ++a)
      for (int b = a + 1; b < cell_size; ++b) d = std::max(d, (vertices[cells[c][a]] - vertices[cells[c][b]]).norm());
    return d;
  }

  /// Mesh size: max cell diameter.
  double h() const {
    double d = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) d = std::max(d, cell_diameter(c));
    return d;
  }

  Point centroid(std::size_t c) const {
    Point p = Point::Zero();
    for (int v : cells[c]) p += vertices[v];
    return p / static_cast<double>(cell_size);
  }

  /// Gradients of the barycentric basis functions (rows) on cell c.
  Eigen::Matrix<double, Dim + 1, Dim> gradients(std::size_t c) const {
    Eigen::Matrix<double, Dim, Dim> j;
    for (int k = 0; k < Dim; ++k) j.col(k) = vertices[cells[c][k + 1]] - vertices[cells[c][0]];
    const Eigen::Matrix<double, Dim, Dim> jinv_t = j.inverse().transpose();
    Eigen::Matrix<double, Dim + 1, Dim> g;
    g.row(0).setZero();
    for (int k = 0; k < Dim; ++k) {
      g.row(k + 1) = jinv_t.col(k).transpose();
      g.row(0) -= g.row(k + 1);
    }
    return g;
  }

  double total_volume() const {
    double v = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) v += volume(c);
    return v;
  }

  /// Throws if a cell is degenerate or an index is out of range.
  void validate() const {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      for (int v : cells[c])
        require(v >= 0 && static_cast<std::size_t>(v) < vertices.size(), "mesh: cell vertex index out of range");
      if (!(volume(c) > 0.0)) throw NumericalFailure("mesh: cell " + std::to_string(c) + " has no volume");
    }
    for (const auto& f : boundary) {
      require(static_cast<int>(f.vertices.size()) == Dim, "mesh: boundary facet has the wrong vertex count");
      require(f.cell >= 0 && static_cast<std::size_t>(f.cell) < cells.size(), "mesh: boundary facet without cell");
    }
  }
};

using Mesh2 = Mesh<2>;
using Mesh3 = Mesh<3>;

/// Red refinement of a triangle mesh: every triangle is split into four.
/// Facet tags and labels are inherited; duplicated slit vertices stay apart
/// because midpoints are keyed by vertex indices.
inline Mesh2 uniform_refine(const Mesh2& mesh) {
  Mesh2 out;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    mid.emplace(key, id);
    return id;
  };
  // cell c becomes cells 4c..4c+3; child k < 3 keeps corner k
  for (const auto& t : mesh.cells) {
    const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]), m20 = midpoint(t[2], t[0]);
    out.cells.push_back({t[0], m01, m20});
    out.cells.push_back({m01, t[1], m12});
    out.cells.push_back({m20, m12, t[2]});
    out.cells.push_back({m01, m12, m20});
  }
  for (const auto& f : mesh.boundary) {
    const int a = f.vertices[0], b = f.vertices[1];
    const int m = midpoint(a, b);
    const auto& t = mesh.cells[f.cell];
    auto corner_child = [&](int v) {
      for (int k = 0; k < 3; ++k)
        if (t[k] == v) return 4 * f.cell + k;
      throw NumericalFailure("uniform_refine: facet vertex not in its cell");
    };
    out.boundary.push_back({{a, m}, corner_child(a), f.dirichlet, f.label});
    out.boundary.push_back({{m, b}, corner_child(b), f.dirichlet, f.label});
  }
  return out;
}

/// Structured tetrahedral mesh of [0,1]³ with n cells per edge, six
/// tetrahedra per cube. Faces are labelled x=0 (0), x=1 (1), y=0 (2),
/// y=1 (3), z=0 (4), z=1 (5).
inline Mesh3 unit_cube_mesh(int n) {
  require(n >= 1, "unit_cube_mesh: need at least one cell per edge");
  Mesh3 mesh;
  auto id = [n](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(double(i) / n, double(j) / n, double(k) / n);
  // Kuhn subdivision: one tetrahedron per permutation of the axes
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> at{i, j, k};
          std::array<int, 4> tet;
          tet[0] = id(at[0], at[1], at[2]);
          for (int s = 0; s < 3; ++s) {
            ++at[p[s]];
            tet[s + 1] = id(at[0], at[1], at[2]);
          }
          mesh.cells.push_back(tet);
        }
  for (std::size_t c = 0; c < mesh.cells.size(); ++c)
    if (mesh.signed_volume(c) < 0.0) std::swap(mesh.cells[c][2], mesh.cells[c][3]);
  // boundary faces: facets of cells with all vertices on one cube face
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& t = mesh.cells[c];
    for (int skip = 0; skip < 4; ++skip) {
      std::vector<int> f;
      for (int a = 0; a < 4; ++a)
        if (a != skip) f.push_back(t[a]);
      for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side) {
          const bool on = std::all_of(f.begin(), f.end(), [&](int v) { return mesh.vertices[v][axis] == side; });
          if (on) mesh.boundary.push_back({f, static_cast<int>(c), 0u, 2 * axis + side});
        }
    }
  }
  return mesh;
}

}  // namespace mixedreg::fem
