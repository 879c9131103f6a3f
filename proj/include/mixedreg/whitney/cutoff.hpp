#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/geometry/segment_set.hpp"

#include <algorithm>

namespace mixedreg::whitney {

/// ζ_n(t): 0 on [0, 1/n], n t − 1 on [1/n, 2/n], 1 beyond.
inline double zeta(int n, double t) { return std::clamp(n * t - 1.0, 0.0, 1.0); }

/// w_n = ζ_n ∘ dist_F.
inline double cutoff_weight(int n, const Point2& x, const geometry::SegmentSet& set) {
  return zeta(n, geometry::dist_to_set(x, set));
}

template <class S>
struct CutoffResult {
  Vector<S> values;
  /// 2/n < 2h: the transition layer is thinner than two cells.
  bool unresolved = false;
};

/// Nodal interpolant of u·w_n for a P1 function u (vertex values).
template <class S>
CutoffResult<S> cutoff_mollify(const fem::Mesh2& mesh, const Vector<S>& u, const geometry::SegmentSet& set, int n) {
  require(n >= 1, "cutoff_mollify: index n must be positive");
  require(static_cast<std::size_t>(u.size()) == mesh.num_vertices(), "cutoff_mollify: one value per vertex expected");
  CutoffResult<S> r;
  r.values.resize(u.size());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    r.values(static_cast<Eigen::Index>(v)) = u(static_cast<Eigen::Index>(v)) * cutoff_weight(n, mesh.vertices[v], set);
  r.unresolved = 2.0 / n < 2.0 * mesh.h();
  return r;
}

}  // namespace mixedreg::whitney
