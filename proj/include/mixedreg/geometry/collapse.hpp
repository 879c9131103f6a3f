#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/geometry/scene.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace mixedreg::geometry {

namespace detail {

// Parameter intervals of edge e covered by collinear members of `cover`.
inline std::vector<std::pair<double, double>> covered_intervals(const Segment& e, const SegmentSet& cover, double tol) {
  std::vector<std::pair<double, double>> iv;
  const Point2 d = e.b - e.a;
  const double len2 = d.squaredNorm();
  for (const Segment& s : cover.segments()) {
    if (point_segment_distance(s.a, {e.a - 1e6 * d, e.b + 1e6 * d}) > tol ||
        point_segment_distance(s.b, {e.a - 1e6 * d, e.b + 1e6 * d}) > tol)
      continue;
    double t0 = (s.a - e.a).dot(d) / len2;
    double t1 = (s.b - e.a).dot(d) / len2;
    if (t0 > t1) std::swap(t0, t1);
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, 1.0);
    if (t1 > t0) iv.emplace_back(t0, t1);
  }
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& i : iv) {
    if (!merged.empty() && i.first <= merged.back().second + 1e-12) merged.back().second = std::max(merged.back().second, i.second);
    else merged.push_back(i);
  }
  return merged;
}

inline bool segment_covered(const Segment& s, const std::vector<DirichletPiece>& pieces, bool need_both_faces, double tol) {
  for (const auto& p : pieces) {
    if (need_both_faces && p.side != Side::both) continue;
    if (point_segment_distance(s.a, p.segment) <= tol && point_segment_distance(s.b, p.segment) <= tol) return true;
  }
  return false;
}

}  // namespace detail

/// Ω_• = interior(Ω ∪ E): slit portions contained in E disappear; the new
/// Dirichlet part is E ∩ ∂Ω_•.
inline PlanarScene collapse_crack(const PlanarScene& scene, const SegmentSet& crack) {
  const double tol = scene.tolerance();
  for (const Segment& s : crack.segments()) {
    bool on_slit = false;
    require(scene.on_boundary(s, &on_slit), "collapse_crack: E is not part of the boundary");
    require(detail::segment_covered(s, scene.dirichlet(), on_slit, tol),
            "collapse_crack: E is not a subset of the Dirichlet set");
  }

  std::vector<std::vector<Point2>> slits;
  for (const auto& slit : scene.slits()) {
    std::vector<Point2> current;
    auto flush = [&] {
      if (current.size() >= 2) slits.push_back(current);
      current.clear();
    };
    for (std::size_t k = 0; k + 1 < slit.size(); ++k) {
      const Segment e{slit[k], slit[k + 1]};
      std::vector<std::pair<double, double>> kept;
      double t = 0.0;
      for (const auto& [c0, c1] : detail::covered_intervals(e, crack, tol)) {
        if (c0 > t + 1e-12) kept.emplace_back(t, c0);
        t = std::max(t, c1);
      }
      if (t < 1.0 - 1e-12) kept.emplace_back(t, 1.0);
      for (const auto& [k0, k1] : kept) {
        const Point2 p0 = (k0 == 0.0) ? e.a : e.at(k0);
        const Point2 p1 = (k1 == 1.0) ? e.b : e.at(k1);
        if (!current.empty() && (current.back() - p0).norm() <= tol) {
          current.push_back(p1);
        } else {
          flush();
          current = {p0, p1};
        }
      }
    }
    flush();
  }

  std::vector<DirichletPiece> dirichlet;
  for (const Segment& s : crack.segments()) {
    bool on_slit = false;
    if (scene.on_boundary(s, &on_slit) && !on_slit) dirichlet.push_back({s, Side::both});
  }
  return PlanarScene(scene.name() + "_collapsed", scene.outer(), scene.holes(), std::move(slits), std::move(dirichlet));
}

}  // namespace mixedreg::geometry
