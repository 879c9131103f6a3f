#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/geometry/segment_set.hpp"

#include <functional>
#include <vector>

namespace mixedreg::fem {

/// Decides whether a boundary facet belongs to one component's Dirichlet set.
using FacetSelector = std::function<bool(const BoundaryFacet&)>;

namespace select {

/// Facets whose Dirichlet mask has bit `component` set.
inline FacetSelector tagged(int component = 0) {
  return [component](const BoundaryFacet& f) { return (f.dirichlet >> component) & 1u; };
}

inline FacetSelector labels(std::vector<int> labels) {
  return [labels = std::move(labels)](const BoundaryFacet& f) {
    for (int l : labels)
      if (f.label == l) return true;
    return false;
  };
}

inline FacetSelector nowhere() {
  return [](const BoundaryFacet&) { return false; };
}

inline FacetSelector everywhere() {
  return [](const BoundaryFacet&) { return true; };
}

/// 2D facets lying on a segment set (both endpoints within tol).
inline FacetSelector on_segments(const Mesh2& mesh, geometry::SegmentSet set, double tol = 1e-9) {
  return [&mesh, set = std::move(set), tol](const BoundaryFacet& f) {
    for (const auto& s : set.segments())
      if (geometry::point_segment_distance(mesh.vertices[f.vertices[0]], s) <= tol &&
          geometry::point_segment_distance(mesh.vertices[f.vertices[1]], s) <= tol)
        return true;
    return false;
  };
}

}  // namespace select

/// Numbering of the free (unconstrained) degrees of freedom of a vector P1
/// space with m components; dof (v, c) has full index v·m + c.
class DofMap {
 public:
  DofMap() = default;

  template <int Dim>
  DofMap(const Mesh<Dim>& mesh, const std::vector<FacetSelector>& dirichlet) : vertices_(mesh.num_vertices()) {
    components_ = static_cast<int>(dirichlet.size());
    require(components_ >= 1, "DofMap: need at least one component");
    constrained_.assign(vertices_ * components_, 0);
    for (const auto& f : mesh.boundary)
      for (int c = 0; c < components_; ++c)
        if (dirichlet[c] && dirichlet[c](f))
          for (int v : f.vertices) constrained_[static_cast<std::size_t>(v) * components_ + c] = 1;
    free_index_.assign(constrained_.size(), -1);
    for (std::size_t k = 0; k < constrained_.size(); ++k)
      if (!constrained_[k]) {
        free_index_[k] = static_cast<int>(free_.size());
        free_.push_back(static_cast<int>(k));
      }
  }

  int components() const { return components_; }
  std::size_t num_vertices() const { return vertices_; }
  std::size_t num_full() const { return constrained_.size(); }
  std::size_t num_free() const { return free_.size(); }
  bool constrained(std::size_t vertex, int component) const { return constrained_[vertex * components_ + component]; }
  std::size_t num_constrained(int component) const {
    std::size_t n = 0;
    for (std::size_t v = 0; v < vertices_; ++v) n += constrained(v, component);
    return n;
  }
  /// Free index of (vertex, component) or -1.
  int free_index(std::size_t vertex, int component) const { return free_index_[vertex * components_ + component]; }
  /// Full index of free dof k.
  int full_index(std::size_t k) const { return free_[k]; }

  /// Free-dof vector to full vector (zero on constrained dofs).
  template <class S>
  Vector<S> expand(const Vector<S>& u) const {
    require(static_cast<std::size_t>(u.size()) == free_.size(), "DofMap::expand: size mismatch");
    Vector<S> full = Vector<S>::Zero(static_cast<Eigen::Index>(constrained_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) full(free_[k]) = u(static_cast<Eigen::Index>(k));
    return full;
  }

  /// Full vector to free dofs (constrained values dropped).
  template <class S>
  Vector<S> restrict_free(const Vector<S>& full) const {
    require(static_cast<std::size_t>(full.size()) == constrained_.size(), "DofMap::restrict_free: size mismatch");
    Vector<S> u(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) u(static_cast<Eigen::Index>(k)) = full(free_[k]);
    return u;
  }

 private:
  std::size_t vertices_ = 0;
  int components_ = 1;
  std::vector<char> constrained_;
  std::vector<int> free_index_;
  std::vector<int> free_;
};

}  // namespace mixedreg::fem
