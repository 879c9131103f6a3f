#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/geometry/segment_set.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace mixedreg::fem {

namespace detail {

inline bool on_set(const Point2& x, const geometry::SegmentSet& set, double tol) {
  for (const auto& s : set.segments())
    if (geometry::point_segment_distance(x, s) <= tol) return true;
  return false;
}

inline std::pair<long long, long long> position_key(const Point2& x, double tol) {
  return {std::llround(x.x() / tol), std::llround(x.y() / tol)};
}

}  // namespace detail

/// Mesh of the collapsed domain Ω_• = Ω ∪ E: duplicated vertices on the
/// crack E are merged and the crack facets become interior. Cell indices are
/// preserved.
inline Mesh2 merge_crack(const Mesh2& mesh, const geometry::SegmentSet& crack, double tol = 1e-9) {
  std::map<std::pair<long long, long long>, int> seen;
  std::vector<int> to(mesh.num_vertices());
  Mesh2 out;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point2& x = mesh.vertices[v];
    if (detail::on_set(x, crack, tol)) {
      auto [it, fresh] = seen.emplace(detail::position_key(x, tol), static_cast<int>(out.vertices.size()));
      if (!fresh) {
        to[v] = it->second;
        continue;
      }
    }
    to[v] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(x);
  }
  for (auto t : mesh.cells) {
    for (int& v : t) v = to[v];
    out.cells.push_back(t);
  }
  for (const auto& f : mesh.boundary) {
    const Point2 mid = 0.5 * (mesh.vertices[f.vertices[0]] + mesh.vertices[f.vertices[1]]);
    if (detail::on_set(mid, crack, tol)) continue;
    out.boundary.push_back({{to[f.vertices[0]], to[f.vertices[1]]}, f.cell, f.dirichlet, f.label});
  }
  return out;
}

/// Extension by zero of u (vertex values on `mesh`, vanishing on the crack E)
/// to `mesh_big`, a mesh of Ω_• whose vertices include those of `mesh`
/// (coincident positions). Vertices of mesh_big without a partner get 0.
template <class S>
Vector<S> zero_extend(const Mesh2& mesh, const Vector<S>& u, const geometry::SegmentSet& crack, const Mesh2& mesh_big,
                      double tol = 1e-12) {
  require(static_cast<std::size_t>(u.size()) == mesh.num_vertices(), "zero_extend: one value per vertex expected");
  const double geo_tol = 1e-9;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (detail::on_set(mesh.vertices[v], crack, geo_tol) && std::abs(u(static_cast<Eigen::Index>(v))) > tol)
      throw InvalidInput("zero_extend: nonzero trace " + std::to_string(std::abs(u(static_cast<Eigen::Index>(v)))) +
                         " on E at vertex " + std::to_string(v));
  std::map<std::pair<long long, long long>, int> where;
  for (std::size_t v = 0; v < mesh_big.num_vertices(); ++v)
    where.emplace(detail::position_key(mesh_big.vertices[v], geo_tol), static_cast<int>(v));
  Vector<S> out = Vector<S>::Zero(static_cast<Eigen::Index>(mesh_big.num_vertices()));
  std::vector<char> set(mesh_big.num_vertices(), 0);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    auto it = where.find(detail::position_key(mesh.vertices[v], geo_tol));
    require(it != where.end(), "zero_extend: vertex " + std::to_string(v) + " of Ω has no partner in the Ω_• mesh");
    const S value = u(static_cast<Eigen::Index>(v));
    if (set[it->second] && std::abs(out(it->second) - value) > tol)
      throw InvalidInput("zero_extend: duplicated vertex carries two different values");
    out(it->second) = value;
    set[it->second] = 1;
  }
  return out;
}

}  // namespace mixedreg::fem
