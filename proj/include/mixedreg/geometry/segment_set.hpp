#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace mixedreg::geometry {

struct Segment {
  Point2 a;
  Point2 b;

  double length() const { return (b - a).norm(); }
  Point2 at(double t) const { return a + t * (b - a); }
};

/// Parameter interval [t0, t1] of a segment, t in [0, 1].
struct SegmentPiece {
  std::size_t segment;
  double t0;
  double t1;
};

inline double point_segment_distance(const Point2& x, const Segment& s) {
  const Point2 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (x - s.a).norm();
  const double t = std::clamp((x - s.a).dot(d) / len2, 0.0, 1.0);
  return (x - s.at(t)).norm();
}

inline Point2 closest_point_on_segment(const Point2& x, const Segment& s) {
  const Point2 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return s.a;
  return s.at(std::clamp((x - s.a).dot(d) / len2, 0.0, 1.0));
}

/// Parameter range of the segment inside the closed disc B(c, r), if any.
inline std::optional<std::pair<double, double>> clip_segment_to_disc(const Segment& s, const Point2& c, double r) {
  const Point2 d = s.b - s.a;
  const double qa = d.squaredNorm();
  if (qa == 0.0) {
    if ((s.a - c).squaredNorm() <= r * r) return std::pair{0.0, 1.0};
    return std::nullopt;
  }
  // foot of the perpendicular from c; the offset is formed directly so tiny
  // discs far from the endpoints keep their relative accuracy
  const double tp = (c - s.a).dot(d) / qa;
  const double h = (c - (s.a + tp * d)).norm();
  if (h > r) return std::nullopt;
  const double half = std::sqrt((r - h) * (r + h) / qa);
  const double t0 = std::max(tp - half, 0.0);
  const double t1 = std::min(tp + half, 1.0);
  if (t0 > t1) return std::nullopt;
  return std::pair{t0, t1};
}

inline bool segments_intersect(const Segment& s, const Segment& t) {
  auto orient = [](const Point2& p, const Point2& q, const Point2& r) {
    const double v = cross(q - p, r - p);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](const Point2& p, const Point2& q, const Point2& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  const int o1 = orient(s.a, s.b, t.a), o2 = orient(s.a, s.b, t.b);
  const int o3 = orient(t.a, t.b, s.a), o4 = orient(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

inline double segment_segment_distance(const Segment& s, const Segment& t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t), point_segment_distance(t.a, s),
                   point_segment_distance(t.b, s)});
}

/// Axis-aligned square or rectangle [lo, hi].
struct Box {
  Point2 lo;
  Point2 hi;

  Point2 center() const { return 0.5 * (lo + hi); }
  double side() const { return hi.x() - lo.x(); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Point2& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
  double distance(const Point2& p) const {
    const double dx = std::max({lo.x() - p.x(), 0.0, p.x() - hi.x()});
    const double dy = std::max({lo.y() - p.y(), 0.0, p.y() - hi.y()});
    return std::hypot(dx, dy);
  }
};

inline double box_segment_distance(const Box& box, const Segment& s) {
  if (box.contains(s.a) || box.contains(s.b)) return 0.0;
  const Point2 c[4] = {box.lo, {box.hi.x(), box.lo.y()}, box.hi, {box.lo.x(), box.hi.y()}};
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    const Segment edge{c[k], c[(k + 1) % 4]};
    if (segments_intersect(edge, s)) return 0.0;
    best = std::min(best, point_segment_distance(c[k], s));
  }
  return std::min({best, box.distance(s.a), box.distance(s.b)});
}

/// Finite union of closed segments carrying arclength measure. Segments are
/// assumed to overlap at most in finitely many points.
class SegmentSet {
 public:
  SegmentSet() = default;

  /// Zero-length segments (points) are rejected unless allow_points is set;
  /// point members carry no measure.
  explicit SegmentSet(std::vector<Segment> segments, bool allow_points = false) : segments_(std::move(segments)) {
    for (const Segment& s : segments_) {
      require(s.a.allFinite() && s.b.allFinite(), "SegmentSet: non-finite endpoint");
      require(allow_points || s.length() > 0.0, "SegmentSet: segment of zero length");
      total_length_ += s.length();
    }
  }

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  double total_length() const { return total_length_; }

  Box bounding_box() const {
    require(!empty(), "SegmentSet: empty set has no bounding box");
    Box b{segments_.front().a, segments_.front().a};
    for (const Segment& s : segments_) {
      for (const Point2& p : {s.a, s.b}) {
        b.lo = b.lo.cwiseMin(p);
        b.hi = b.hi.cwiseMax(p);
      }
    }
    return b;
  }

  double diameter() const {
    double d = 0.0;
    for (const Segment& s : segments_)
      for (const Segment& t : segments_)
        for (const Point2& p : {s.a, s.b})
          for (const Point2& q : {t.a, t.b}) d = std::max(d, (p - q).norm());
    return d;
  }

  /// Arclength measure of F intersected with the closed disc B(c, r).
  double measure_in_disc(const Point2& c, double r) const {
    double m = 0.0;
    for (const Segment& s : segments_) {
      if (auto range = clip_segment_to_disc(s, c, r)) m += (range->second - range->first) * s.length();
    }
    return m;
  }

  std::vector<SegmentPiece> clip_to_disc(const Point2& c, double r) const {
    std::vector<SegmentPiece> pieces;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const Segment& s = segments_[i];
      if (s.length() == 0.0) continue;
      if (auto range = clip_segment_to_disc(s, c, r); range && range->second > range->first)
        pieces.push_back({i, range->first, range->second});
    }
    return pieces;
  }

  double distance_to_box(const Box& box) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments_) best = std::min(best, box_segment_distance(box, s));
    return best;
  }

  Point2 closest_point(const Point2& x) const {
    require(!empty(), "dist_to_set: empty set");
    Point2 best = segments_.front().a;
    double bd = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments_) {
      const Point2 p = closest_point_on_segment(x, s);
      const double d = (x - p).norm();
      if (d < bd) {
        bd = d;
        best = p;
      }
    }
    return best;
  }

  SegmentSet transformed(const Point2& shift, double scale) const {
    std::vector<Segment> out;
    out.reserve(segments_.size());
    for (const Segment& s : segments_) out.push_back({(s.a - shift) * scale, (s.b - shift) * scale});
    return SegmentSet(std::move(out), true);
  }

 private:
  std::vector<Segment> segments_;
  double total_length_ = 0.0;
};

/// Exact Euclidean distance from x to the set F.
inline double dist_to_set(const Point2& x, const SegmentSet& set) {
  require(!set.empty(), "dist_to_set: empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : set.segments()) best = std::min(best, point_segment_distance(x, s));
  return best;
}

}  // namespace mixedreg::geometry
