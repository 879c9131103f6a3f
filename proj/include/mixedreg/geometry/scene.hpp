#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/geometry/clipping.hpp"
#include "mixedreg/geometry/segment_set.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mixedreg::geometry {

/// Which face of a slit carries a Dirichlet piece. Left/right refer to the
/// piece's own direction a -> b. Loop edges only have one face, so the side
/// is ignored there.
enum class Side { both, left, right };

struct DirichletPiece {
  Segment segment;
  Side side = Side::both;
};

/// Polygonal domain Ω (outer loop minus holes, cut by slits) with the
/// Dirichlet part D of the boundary. The Neumann part is the complement.
class PlanarScene {
 public:
  PlanarScene(std::string name, std::vector<Point2> outer, std::vector<std::vector<Point2>> holes = {},
              std::vector<std::vector<Point2>> slits = {}, std::vector<DirichletPiece> dirichlet = {})
      : name_(std::move(name)),
        outer_(std::move(outer)),
        holes_(std::move(holes)),
        slits_(std::move(slits)),
        dirichlet_(std::move(dirichlet)) {
    if (polygon_signed_area(outer_) < 0.0) std::reverse(outer_.begin(), outer_.end());
    for (auto& h : holes_)
      if (polygon_signed_area(h) > 0.0) std::reverse(h.begin(), h.end());
    validate();
  }

  const std::string& name() const { return name_; }
  const std::vector<Point2>& outer() const { return outer_; }
  const std::vector<std::vector<Point2>>& holes() const { return holes_; }
  const std::vector<std::vector<Point2>>& slits() const { return slits_; }
  const std::vector<DirichletPiece>& dirichlet() const { return dirichlet_; }

  SegmentSet dirichlet_set() const {
    std::vector<Segment> s;
    for (const auto& d : dirichlet_) s.push_back(d.segment);
    return SegmentSet(std::move(s));
  }

  /// Edges of all loops (outer first, then holes).
  std::vector<Segment> loop_edges() const {
    std::vector<Segment> e;
    auto add = [&](const std::vector<Point2>& loop) {
      for (std::size_t i = 0; i < loop.size(); ++i) e.push_back({loop[i], loop[(i + 1) % loop.size()]});
    };
    add(outer_);
    for (const auto& h : holes_) add(h);
    return e;
  }

  std::vector<Segment> slit_edges() const {
    std::vector<Segment> e;
    for (const auto& s : slits_)
      for (std::size_t i = 0; i + 1 < s.size(); ++i) e.push_back({s[i], s[i + 1]});
    return e;
  }

  /// ∂Ω as a segment set: loop edges plus slit edges.
  SegmentSet boundary_set() const {
    auto e = loop_edges();
    auto s = slit_edges();
    e.insert(e.end(), s.begin(), s.end());
    return SegmentSet(std::move(e));
  }

  /// Open-set membership, ignoring slits (slits have zero area).
  bool contains(const Point2& p) const {
    if (!point_in_polygon(outer_, p)) return false;
    for (const auto& h : holes_)
      if (point_in_polygon(h, p)) return false;
    return true;
  }

  double area() const {
    double a = std::abs(polygon_signed_area(outer_));
    for (const auto& h : holes_) a -= std::abs(polygon_signed_area(h));
    return a;
  }

  Box bounding_box() const {
    Box b{outer_.front(), outer_.front()};
    for (const Point2& p : outer_) {
      b.lo = b.lo.cwiseMin(p);
      b.hi = b.hi.cwiseMax(p);
    }
    return b;
  }

  double diameter() const {
    double d = 0.0;
    for (const Point2& p : outer_)
      for (const Point2& q : outer_) d = std::max(d, (p - q).norm());
    return d;
  }

  /// Copy with every coordinate mapped to (x - shift) * scale.
  PlanarScene transformed(const Point2& shift, double scale) const {
    auto map = [&](std::vector<Point2> pts) {
      for (Point2& p : pts) p = (p - shift) * scale;
      return pts;
    };
    std::vector<std::vector<Point2>> holes, slits;
    for (const auto& h : holes_) holes.push_back(map(h));
    for (const auto& s : slits_) slits.push_back(map(s));
    std::vector<DirichletPiece> dir;
    for (const auto& d : dirichlet_) dir.push_back({{(d.segment.a - shift) * scale, (d.segment.b - shift) * scale}, d.side});
    return PlanarScene(name_, map(outer_), std::move(holes), std::move(slits), std::move(dir));
  }

  /// The same scene rescaled to unit diameter about its bounding-box center.
  PlanarScene normalized() const { return transformed(bounding_box().center(), 1.0 / diameter()); }

  double tolerance() const { return 1e-9 * diameter(); }

  /// True if segment s lies inside one loop or slit edge (collinear, contained).
  bool on_boundary(const Segment& s, bool* on_slit = nullptr) const {
    const double tol = tolerance();
    auto covered_by = [&](const Segment& e) {
      return point_segment_distance(s.a, e) <= tol && point_segment_distance(s.b, e) <= tol;
    };
    for (const Segment& e : loop_edges())
      if (covered_by(e)) {
        if (on_slit) *on_slit = false;
        return true;
      }
    for (const Segment& e : slit_edges())
      if (covered_by(e)) {
        if (on_slit) *on_slit = true;
        return true;
      }
    return false;
  }

 private:
  void validate() const {
    require(outer_.size() >= 3, "scene '" + name_ + "': outer loop needs at least 3 vertices");
    std::vector<std::vector<Point2>> loops{outer_};
    for (const auto& h : holes_) {
      require(h.size() >= 3, "scene '" + name_ + "': hole needs at least 3 vertices");
      loops.push_back(h);
    }
    const double tol = 1e-12 * std::max(1.0, diameter());
    auto edges_of = [](const std::vector<Point2>& loop) {
      std::vector<Segment> e;
      for (std::size_t i = 0; i < loop.size(); ++i) e.push_back({loop[i], loop[(i + 1) % loop.size()]});
      return e;
    };
    for (std::size_t li = 0; li < loops.size(); ++li) {
      const auto ei = edges_of(loops[li]);
      for (std::size_t a = 0; a < ei.size(); ++a) {
        require(ei[a].length() > tol, "scene '" + name_ + "': loop " + std::to_string(li) + " has a zero-length edge");
        for (std::size_t b = a + 1; b < ei.size(); ++b) {
          const bool adjacent = (b == a + 1) || (a == 0 && b == ei.size() - 1);
          if (adjacent) continue;
          require(!segments_intersect(ei[a], ei[b]),
                  "scene '" + name_ + "': loop " + std::to_string(li) + " self-intersects at edge " + std::to_string(a));
        }
      }
      for (std::size_t lj = li + 1; lj < loops.size(); ++lj)
        for (const Segment& s : ei)
          for (const Segment& t : edges_of(loops[lj]))
            require(!segments_intersect(s, t), "scene '" + name_ + "': loops " + std::to_string(li) + " and " +
                                                   std::to_string(lj) + " intersect");
    }
    for (const auto& h : holes_)
      require(point_in_polygon(outer_, h.front()), "scene '" + name_ + "': hole outside the outer loop");

    const auto boundary = loop_edges();
    for (std::size_t si = 0; si < slits_.size(); ++si) {
      const auto& s = slits_[si];
      require(s.size() >= 2, "scene '" + name_ + "': slit " + std::to_string(si) + " needs two points");
      for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const Segment e{s[k], s[k + 1]};
        require(e.length() > tol, "scene '" + name_ + "': slit " + std::to_string(si) + " has zero length");
        require(contains(0.5 * (e.a + e.b)), "scene '" + name_ + "': slit " + std::to_string(si) + " leaves the domain");
        for (const Segment& b : boundary) {
          if (!segments_intersect(e, b)) continue;
          // touching the boundary at a slit endpoint is allowed
          const bool touch_a = (k == 0) && point_segment_distance(e.a, b) <= tol;
          const bool touch_b = (k + 2 == s.size()) && point_segment_distance(e.b, b) <= tol;
          require(touch_a || touch_b,
                  "scene '" + name_ + "': slit " + std::to_string(si) + " crosses the boundary");
        }
      }
    }
    for (std::size_t di = 0; di < dirichlet_.size(); ++di) {
      const auto& d = dirichlet_[di];
      require(d.segment.length() > tol, "scene '" + name_ + "': Dirichlet piece " + std::to_string(di) + " has zero length");
      require(on_boundary(d.segment),
              "scene '" + name_ + "': Dirichlet piece " + std::to_string(di) + " does not lie on the boundary or a slit");
    }
  }

  std::string name_;
  std::vector<Point2> outer_;
  std::vector<std::vector<Point2>> holes_;
  std::vector<std::vector<Point2>> slits_;
  std::vector<DirichletPiece> dirichlet_;
};

/// Frequently used scenes.
namespace scenes {

inline std::vector<Point2> square_loop(double x0 = 0.0, double y0 = 0.0, double side = 1.0) {
  return {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}};
}

inline std::vector<Point2> circle_loop(const Point2& c, double r, int n) {
  std::vector<Point2> p;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    p.push_back(c + r * Point2(std::cos(t), std::sin(t)));
  }
  return p;
}

/// Unit square; `dirichlet_edges` selects edges bottom(0), right(1), top(2), left(3).
inline PlanarScene unit_square(std::vector<int> dirichlet_edges = {}) {
  auto loop = square_loop();
  std::vector<DirichletPiece> d;
  for (int e : dirichlet_edges) d.push_back({{loop[e], loop[(e + 1) % 4]}, Side::both});
  return PlanarScene("unit_square", loop, {}, {}, std::move(d));
}

/// Unit square with the slit {(x, 0.5) : 0.25 <= x <= 0.75} carrying the Dirichlet condition.
inline PlanarScene slit_square() {
  const Point2 a(0.25, 0.5), b(0.75, 0.5);
  return PlanarScene("slit_square", square_loop(), {}, {{a, b}}, {{{a, b}, Side::both}});
}

/// Unit square cut by the slit {(x, 0.5) : 0 <= x <= 0.5} attached to the left
/// edge. Only the upper face of the slit is Dirichlet; the lower face and the
/// outer boundary are Neumann, so the boundary condition changes at the tip.
inline PlanarScene mixed_slit_square() {
  const Point2 a(0.0, 0.5), b(0.5, 0.5);
  std::vector<Point2> loop{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0.5}};
  return PlanarScene("mixed_slit_square", loop, {}, {{a, b}}, {{{a, b}, Side::left}});
}

inline PlanarScene disc(int n = 64) { return PlanarScene("disc", circle_loop({0, 0}, 1.0, n)); }

/// Unit disc with an internally tangent disc of radius 1/2 removed: the
/// remaining domain has an outward cusp at (1, 0).
inline PlanarScene cusp_domain(int n = 256) {
  auto outer = circle_loop({0, 0}, 1.0, n);
  auto inner = circle_loop({0.5, 0}, 0.5, n);
  // shrink the inner disc slightly so the polygons do not touch
  for (Point2& p : inner) p = Point2(0.5, 0) + (1.0 - 2.0 / n) * (p - Point2(0.5, 0));
  return PlanarScene("cusp_domain", std::move(outer), {std::move(inner)});
}

inline PlanarScene l_shape(std::vector<int> dirichlet_edges = {}) {
  std::vector<Point2> loop{{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}};
  std::vector<DirichletPiece> d;
  for (int e : dirichlet_edges) d.push_back({{loop[e], loop[(e + 1) % loop.size()]}, Side::both});
  return PlanarScene("l_shape", loop, {}, {}, std::move(d));
}

}  // namespace scenes

}  // namespace mixedreg::geometry
