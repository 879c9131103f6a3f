#pragma once

#include "mixedreg/core/types.hpp"
#include "mixedreg/geometry/segment_set.hpp"

#include <cmath>
#include <vector>

namespace mixedreg::geometry {

namespace detail {

// Signed area of the intersection of the disc B(0, r) with triangle (0, a, b).
inline double signed_disc_triangle_area(const Point2& a, const Point2& b, double r) {
  const double r2 = r * r;
  auto inside = [&](const Point2& p) { return p.squaredNorm() <= r2; };
  auto sector = [&](const Point2& u, const Point2& v) { return 0.5 * r2 * std::atan2(cross(u, v), u.dot(v)); };
  auto triangle = [](const Point2& u, const Point2& v) { return 0.5 * cross(u, v); };

  const Point2 d = b - a;
  const double qa = d.squaredNorm();
  if (qa == 0.0) return 0.0;
  const double qb = a.dot(d);
  const double qc = a.squaredNorm() - r2;
  const double disc = qb * qb - qa * qc;
  if (disc <= 0.0) return sector(a, b);
  const double root = std::sqrt(disc);
  const double t0 = (-qb - root) / qa;
  const double t1 = (-qb + root) / qa;
  if (t1 <= 0.0 || t0 >= 1.0) return sector(a, b);
  const Point2 p0 = (t0 > 0.0) ? Point2(a + t0 * d) : a;
  const Point2 p1 = (t1 < 1.0) ? Point2(a + t1 * d) : b;
  double area = 0.0;
  area += (t0 > 0.0 && !inside(a)) ? sector(a, p0) : 0.0;
  area += triangle(p0, p1);
  area += (t1 < 1.0 && !inside(b)) ? sector(p1, b) : 0.0;
  return area;
}

}  // namespace detail

inline double polygon_signed_area(const std::vector<Point2>& loop) {
  double a = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) a += cross(loop[i], loop[(i + 1) % loop.size()]);
  return 0.5 * a;
}

/// Area of (polygon interior) ∩ B(c, r), exact up to rounding. The polygon
/// may have either orientation.
inline double polygon_disc_area(const std::vector<Point2>& loop, const Point2& c, double r) {
  double a = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    a += detail::signed_disc_triangle_area(loop[i] - c, loop[(i + 1) % loop.size()] - c, r);
  return std::abs(a);
}

/// Even-odd point-in-polygon test; points on the boundary are unspecified.
inline bool point_in_polygon(const std::vector<Point2>& loop, const Point2& p) {
  bool in = false;
  for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
    const Point2& a = loop[i];
    const Point2& b = loop[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

}  // namespace mixedreg::geometry
