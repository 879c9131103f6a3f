#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/geometry/clipping.hpp"
#include "mixedreg/geometry/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace mixedreg::geometry {

struct RelativeVolumeRow {
  Point2 point;
  double min_ratio;
};

struct RelativeVolumeTable {
  std::vector<RelativeVolumeRow> rows;
  double global_min = std::numeric_limits<double>::infinity();
};

/// |B(y, r) ∩ Ω| by polygon-disc clipping; slits have no area.
inline double domain_disc_area(const PlanarScene& scene, const Point2& y, double r) {
  double a = polygon_disc_area(scene.outer(), y, r);
  for (const auto& h : scene.holes()) a -= polygon_disc_area(h, y, r);
  return std::max(a, 0.0);
}

/// Minimum over the radius grid of |B(y, r) ∩ Ω| / r² for each point y.
inline RelativeVolumeTable relative_volume(const PlanarScene& scene, std::span<const Point2> points,
                                           std::span<const double> r_grid) {
  require(!r_grid.empty(), "relative_volume: empty radius grid");
  const double diam = scene.diameter();
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    require(r_grid[k] > 0.0, "relative_volume: radii must be positive");
    require(r_grid[k] <= diam, "relative_volume: radius exceeds the scene diameter");
    if (k > 0) require(r_grid[k] < r_grid[k - 1], "relative_volume: radii must be decreasing");
  }
  RelativeVolumeTable table;
  for (const Point2& y : points) {
    double m = std::numeric_limits<double>::infinity();
    for (double r : r_grid) m = std::min(m, domain_disc_area(scene, y, r) / (r * r));
    table.rows.push_back({y, m});
    table.global_min = std::min(table.global_min, m);
  }
  return table;
}

/// Samples endpoints and midpoints of every segment of F.
inline RelativeVolumeTable relative_volume(const PlanarScene& scene, const SegmentSet& set,
                                           std::span<const double> r_grid) {
  require(!set.empty(), "relative_volume: empty set");
  std::vector<Point2> pts;
  auto add = [&](const Point2& p) {
    for (const Point2& q : pts)
      if ((p - q).norm() <= 1e-12) return;
    pts.push_back(p);
  };
  for (const Segment& s : set.segments()) {
    add(s.a);
    add(0.5 * (s.a + s.b));
    add(s.b);
  }
  return relative_volume(scene, std::span<const Point2>(pts), r_grid);
}

}  // namespace mixedreg::geometry
