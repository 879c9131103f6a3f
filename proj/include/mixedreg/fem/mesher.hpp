#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/geometry/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mixedreg::fem {

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Bowyer-Watson Delaunay triangulation. Predicates are evaluated exactly on
// coordinates snapped to a 2^24 integer grid over the bounding box; the
// original double coordinates are kept for the finite-element mesh.
class Delaunay {
 public:
  using Int = std::int64_t;

  struct Triangle {
    std::array<int, 3> v;
    // n[k] is the neighbour across the edge opposite v[k]
    std::array<int, 3> n;
    bool alive;
  };

  Delaunay(const Point2& lo, const Point2& hi) : lo_(lo) {
    const double extent = std::max(hi.x() - lo.x(), hi.y() - lo.y());
    require(extent > 0.0, "mesher: degenerate bounding box");
    scale_ = static_cast<double>(Int{1} << 24) / extent;
    const Int big = Int{1} << 26;
    add_vertex({-big, -big});
    add_vertex({2 * big, -big});
    add_vertex({-big, 2 * big});
    triangles_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
  }

  static constexpr int super_vertices = 3;

  const std::vector<Point2>& points() const { return points_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }

  /// Inserts p and returns its vertex index (an existing index when p snaps
  /// onto a vertex already present).
  int insert(const Point2& p) {
    const std::array<Int, 2> q = snap(p);
    const int t = locate(q);
    for (int v : triangles_[t].v)
      if (grid_[v] == q) return v;
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    grid_.push_back(q);

    // cavity: triangles whose circumcircle strictly contains q
    std::vector<int> cavity{t};
    std::unordered_set<int> in_cavity{t};
    for (std::size_t i = 0; i < cavity.size(); ++i) {
      for (int nb : triangles_[cavity[i]].n) {
        if (nb < 0 || in_cavity.count(nb)) continue;
        const auto& v = triangles_[nb].v;
        if (incircle(grid_[v[0]], grid_[v[1]], grid_[v[2]], q) > 0) {
          cavity.push_back(nb);
          in_cavity.insert(nb);
        }
      }
    }
    struct Rim {
      int a, b, outside;
    };
    std::vector<Rim> rim;
    for (int c : cavity) {
      const Triangle& tri = triangles_[c];
      for (int k = 0; k < 3; ++k)
        if (tri.n[k] < 0 || !in_cavity.count(tri.n[k])) rim.push_back({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], tri.n[k]});
    }
    for (int c : cavity) triangles_[c].alive = false;

    std::unordered_map<int, int> starting_at, ending_at;
    std::vector<int> created;
    for (const Rim& r : rim) {
      const int nt = static_cast<int>(triangles_.size());
      triangles_.push_back({{r.a, r.b, id}, {-1, -1, r.outside}, true});
      if (r.outside >= 0) {
        Triangle& o = triangles_[r.outside];
        for (int k = 0; k < 3; ++k)
          if (o.v[k] != r.a && o.v[k] != r.b) o.n[k] = nt;
      }
      starting_at[r.a] = nt;
      ending_at[r.b] = nt;
      created.push_back(nt);
    }
    for (int nt : created) {
      Triangle& tri = triangles_[nt];
      tri.n[0] = starting_at.at(tri.v[1]);  // across (b, p)
      tri.n[1] = ending_at.at(tri.v[0]);    // across (p, a)
    }
    last_ = created.back();
    return id;
  }

  static Int orient(const std::array<Int, 2>& a, const std::array<Int, 2>& b, const std::array<Int, 2>& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  }

  static __int128 incircle(const std::array<Int, 2>& a, const std::array<Int, 2>& b, const std::array<Int, 2>& c,
                           const std::array<Int, 2>& d) {
    const __int128 adx = a[0] - d[0], ady = a[1] - d[1];
    const __int128 bdx = b[0] - d[0], bdy = b[1] - d[1];
    const __int128 cdx = c[0] - d[0], cdy = c[1] - d[1];
    const __int128 alift = adx * adx + ady * ady;
    const __int128 blift = bdx * bdx + bdy * bdy;
    const __int128 clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
  }

  Int orient_vertices(int a, int b, int c) const { return orient(grid_[a], grid_[b], grid_[c]); }

 private:
  std::array<Int, 2> snap(const Point2& p) const {
    return {static_cast<Int>(std::llround((p.x() - lo_.x()) * scale_)), static_cast<Int>(std::llround((p.y() - lo_.y()) * scale_))};
  }

  void add_vertex(const std::array<Int, 2>& q) {
    grid_.push_back(q);
    points_.push_back(lo_ + Point2(static_cast<double>(q[0]), static_cast<double>(q[1])) / scale_);
  }

  int locate(const std::array<Int, 2>& q) const {
    int t = last_;
    if (!triangles_[t].alive)
      for (t = static_cast<int>(triangles_.size()) - 1; !triangles_[t].alive; --t) {
      }
    for (std::size_t steps = 0; steps < 4 * triangles_.size() + 16; ++steps) {
      const Triangle& tri = triangles_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int kk = (k + static_cast<int>(steps)) % 3;
        if (orient(grid_[tri.v[(kk + 1) % 3]], grid_[tri.v[(kk + 2) % 3]], q) < 0) {
          next = tri.n[kk];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    throw NumericalFailure("mesher: point location did not terminate");
  }

  Point2 lo_;
  double scale_ = 1.0;
  std::vector<Point2> points_;
  std::vector<std::array<Int, 2>> grid_;
  std::vector<Triangle> triangles_;
  int last_ = 0;
};

struct Constraint {
  int a, b;
  int label;
  bool slit;
};

}  // namespace detail

/// Interior segments along the tile edges of a tiles×tiles pattern over
/// [lo, hi], split at every crossing.
inline std::vector<geometry::Segment> tile_interfaces(int tiles, const Point2& lo, const Point2& hi) {
  std::vector<geometry::Segment> out;
  const Point2 step = (hi - lo) / tiles;
  for (int k = 1; k < tiles; ++k)
    for (int j = 0; j < tiles; ++j) {
      out.push_back({lo + Point2(k * step.x(), j * step.y()), lo + Point2(k * step.x(), (j + 1) * step.y())});
      out.push_back({lo + Point2(j * step.x(), k * step.y()), lo + Point2((j + 1) * step.x(), k * step.y())});
    }
  return out;
}

/// Conforming Delaunay triangulation of a scene with target mesh size h.
/// Loop and slit edges (split at Dirichlet piece endpoints) are unions of
/// mesh edges; vertices along slits are duplicated, one copy per side.
/// Optional interior interfaces (coefficient jumps) are resolved by mesh
/// edges without duplication. Boundary facet labels index scene.loop_edges()
/// followed by scene.slit_edges(); bit 0 of the Dirichlet mask marks
/// scene.dirichlet().
inline Mesh2 build_mesh(const geometry::PlanarScene& scene, double h_target,
                        const std::vector<geometry::Segment>& interfaces = {}) {
  using geometry::Segment;
  require(h_target > 0.0 && std::isfinite(h_target), "build_mesh: h_target must be positive");
  const double tol = scene.tolerance();
  const auto loop_edges = scene.loop_edges();
  const auto slit_edges = scene.slit_edges();
  std::vector<Segment> features(loop_edges);
  features.insert(features.end(), slit_edges.begin(), slit_edges.end());
  const std::size_t first_interface = features.size();
  for (const Segment& s : interfaces) {
    require(s.length() > tol, "build_mesh: interface of zero length");
    require(scene.contains(0.5 * (s.a + s.b)), "build_mesh: interface outside the domain");
    features.push_back(s);
  }

  // slits and interfaces must not cross each other or themselves
  for (std::size_t i = loop_edges.size(); i < features.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      if (!geometry::segments_intersect(features[i], features[j])) continue;
      const bool share = (features[i].a - features[j].a).norm() <= tol || (features[i].a - features[j].b).norm() <= tol ||
                         (features[i].b - features[j].a).norm() <= tol || (features[i].b - features[j].b).norm() <= tol;
      const bool tip_on_edge = geometry::point_segment_distance(features[i].a, features[j]) <= tol ||
                               geometry::point_segment_distance(features[i].b, features[j]) <= tol;
      if (share || (j < loop_edges.size() && tip_on_edge)) continue;
      throw InvalidInput("build_mesh: interior feature " + std::to_string(i - loop_edges.size()) + " crosses feature " +
                         std::to_string(j));
    }
  const double estimate = scene.area() / (h_target * h_target);
  require(estimate < 4e6, "build_mesh: h_target too small for this scene");

  const geometry::Box box = scene.bounding_box();
  detail::Delaunay dt(box.lo, box.hi);
  std::vector<detail::Constraint> constraints;

  for (std::size_t e = 0; e < features.size(); ++e) {
    const Segment& s = features[e];
    std::vector<double> breaks{0.0, 1.0};
    auto add_break = [&](const Point2& p) {
      if (geometry::point_segment_distance(p, s) > tol) return;
      const double t = (p - s.a).dot(s.b - s.a) / (s.b - s.a).squaredNorm();
      if (t > 1e-12 && t < 1.0 - 1e-12) breaks.push_back(t);
    };
    for (const auto& d : scene.dirichlet()) {
      add_break(d.segment.a);
      add_break(d.segment.b);
    }
    for (const auto& f : features) {
      add_break(f.a);
      add_break(f.b);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double x, double y) { return y - x <= 1e-12; }), breaks.end());
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double len = (breaks[k + 1] - breaks[k]) * s.length();
      const int parts = std::max(1, static_cast<int>(std::ceil(len / h_target - 1e-9)));
      int prev = dt.insert(s.at(breaks[k]));
      for (int p = 1; p <= parts; ++p) {
        const double t = breaks[k] + (breaks[k + 1] - breaks[k]) * p / parts;
        const int cur = dt.insert(p == parts ? (k + 2 == breaks.size() ? s.b : s.at(t)) : s.at(t));
        if (cur == prev) throw NumericalFailure("build_mesh: feature " + std::to_string(e) + " is below mesh resolution");
        const bool interface = e >= first_interface;
        constraints.push_back({prev, cur, interface ? -1 : static_cast<int>(e), !interface && e >= loop_edges.size()});
        prev = cur;
      }
    }
  }

  // hexagonal lattice of interior points away from the features
  const double dy = h_target * std::sqrt(3.0) / 2.0;
  for (int j = 0; box.lo.y() + j * dy < box.hi.y(); ++j) {
    const double y = box.lo.y() + (j + 0.5) * dy;
    for (int i = 0;; ++i) {
      const double x = box.lo.x() + (i + ((j % 2) ? 0.75 : 0.25)) * h_target;
      if (x >= box.hi.x()) break;
      const Point2 p(x, y);
      if (!scene.contains(p)) continue;
      bool clear = true;
      for (const auto& f : features)
        if (geometry::point_segment_distance(p, f) < 0.6 * h_target) {
          clear = false;
          break;
        }
      if (clear) dt.insert(p);
    }
  }

  std::unordered_map<std::uint64_t, std::size_t> constraint_of;
  std::vector<char> inside;
  for (int round = 0;; ++round) {
    if (round > 200) throw NumericalFailure("build_mesh: refinement did not terminate");
    // recover missing constraint edges by midpoint splitting
    for (int pass = 0;; ++pass) {
      if (pass > 60) throw NumericalFailure("build_mesh: constraint recovery did not terminate");
      std::unordered_set<std::uint64_t> edges;
      for (const auto& t : dt.triangles())
        if (t.alive)
          for (int k = 0; k < 3; ++k) edges.insert(detail::edge_key(t.v[k], t.v[(k + 1) % 3]));
      std::vector<detail::Constraint> next;
      bool changed = false;
      for (const auto& c : constraints) {
        if (edges.count(detail::edge_key(c.a, c.b))) {
          next.push_back(c);
          continue;
        }
        const int m = dt.insert(0.5 * (dt.points()[c.a] + dt.points()[c.b]));
        if (m == c.a || m == c.b) throw NumericalFailure("build_mesh: boundary edge cannot be recovered");
        next.push_back({c.a, m, c.label, c.slit});
        next.push_back({m, c.b, c.label, c.slit});
        changed = true;
      }
      constraints.swap(next);
      if (!changed) break;
    }
    constraint_of.clear();
    for (std::size_t k = 0; k < constraints.size(); ++k)
      constraint_of[detail::edge_key(constraints[k].a, constraints[k].b)] = k;

    // regions separated by constraint edges; inside by area-weighted vote
    const auto& tris = dt.triangles();
    std::vector<int> region(tris.size(), -1);
    std::vector<double> vote;
    std::vector<char> touches_super;
    for (std::size_t s = 0; s < tris.size(); ++s) {
      if (!tris[s].alive || region[s] >= 0) continue;
      const int r = static_cast<int>(vote.size());
      vote.push_back(0.0);
      touches_super.push_back(0);
      std::vector<int> stack{static_cast<int>(s)};
      region[s] = r;
      while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        const auto& tri = tris[t];
        const Point2& a = dt.points()[tri.v[0]];
        const Point2& b = dt.points()[tri.v[1]];
        const Point2& c = dt.points()[tri.v[2]];
        const double area = 0.5 * std::abs(cross(b - a, c - a));
        for (int v : tri.v)
          if (v < detail::Delaunay::super_vertices) touches_super[r] = 1;
        vote[r] += scene.contains((a + b + c) / 3.0) ? area : -area;
        for (int k = 0; k < 3; ++k) {
          const int nb = tri.n[k];
          if (nb < 0 || region[nb] >= 0) continue;
          if (constraint_of.count(detail::edge_key(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]))) continue;
          region[nb] = r;
          stack.push_back(nb);
        }
      }
    }
    inside.assign(tris.size(), 0);
    for (std::size_t t = 0; t < tris.size(); ++t)
      if (tris[t].alive && !touches_super[region[t]] && vote[region[t]] > 0.0) inside[t] = 1;

    // size refinement: split the longest edge of oversized triangles
    std::vector<Point2> splits;
    std::unordered_set<std::uint64_t> split_edges;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!inside[t]) continue;
      const auto& v = tris[t].v;
      int best = 0;
      double longest = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double len = (dt.points()[v[k]] - dt.points()[v[(k + 1) % 3]]).norm();
        if (len > longest) {
          longest = len;
          best = k;
        }
      }
      if (longest <= 1.45 * h_target) continue;
      if (split_edges.insert(detail::edge_key(v[best], v[(best + 1) % 3])).second)
        splits.push_back(0.5 * (dt.points()[v[best]] + dt.points()[v[(best + 1) % 3]]));
    }
    if (splits.empty()) break;
    for (const Point2& p : splits) dt.insert(p);
  }

  // extract the inside triangles with compact vertex numbering
  Mesh2 mesh;
  std::vector<int> compact(dt.points().size(), -1);
  std::vector<int> parent;
  for (std::size_t t = 0; t < dt.triangles().size(); ++t) {
    if (!inside[t]) continue;
    const auto& v = dt.triangles()[t].v;
    Mesh2::Cell cell;
    for (int k = 0; k < 3; ++k) {
      if (compact[v[k]] < 0) {
        compact[v[k]] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(dt.points()[v[k]]);
        parent.push_back(v[k]);
      }
      cell[k] = compact[v[k]];
    }
    mesh.cells.push_back(cell);
  }
  require(!mesh.cells.empty(), "build_mesh: no triangle inside the domain");
  for (std::size_t c = 0; c < mesh.cells.size(); ++c)
    if (!(mesh.signed_volume(c) > 0.0))
      throw NumericalFailure("build_mesh: inverted or degenerate triangle near (" + std::to_string(mesh.centroid(c).x()) +
                             ", " + std::to_string(mesh.centroid(c).y()) + ")");

  // duplicate vertices along slits: one copy per group of incident cells
  // connected across non-slit edges
  auto is_slit_edge = [&](int a, int b) {
    auto it = constraint_of.find(detail::edge_key(parent[a], parent[b]));
    return it != constraint_of.end() && constraints[it->second].slit;
  };
  const std::size_t base_vertices = mesh.vertices.size();
  std::vector<std::vector<int>> incident(base_vertices);
  for (std::size_t c = 0; c < mesh.cells.size(); ++c)
    for (int v : mesh.cells[c]) incident[v].push_back(static_cast<int>(c));
  for (std::size_t v = 0; v < base_vertices; ++v) {
    const auto& cells = incident[v];
    std::vector<int> group(cells.size());
    std::iota(group.begin(), group.end(), 0);
    std::function<int(int)> find = [&](int i) { return group[i] == i ? i : group[i] = find(group[i]); };
    for (std::size_t i = 0; i < cells.size(); ++i)
      for (std::size_t j = i + 1; j < cells.size(); ++j)
        for (int w : mesh.cells[cells[i]]) {
          if (w == static_cast<int>(v)) continue;
          const auto& cj = mesh.cells[cells[j]];
          if (std::find(cj.begin(), cj.end(), w) == cj.end()) continue;
          if (!is_slit_edge(static_cast<int>(v), w)) group[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
    std::unordered_map<int, int> copy_of_root;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const int root = find(static_cast<int>(i));
      if (copy_of_root.empty()) copy_of_root[root] = static_cast<int>(v);
      if (!copy_of_root.count(root)) {
        copy_of_root[root] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(mesh.vertices[v]);
        parent.push_back(parent[v]);
      }
      const int target = copy_of_root[root];
      for (int& w : mesh.cells[cells[i]])
        if (w == static_cast<int>(v)) w = target;
    }
  }

  // boundary facets: edges with a single incident cell
  std::unordered_map<std::uint64_t, std::pair<int, int>> edge_cells;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c)
    for (int k = 0; k < 3; ++k) {
      const auto key = detail::edge_key(mesh.cells[c][k], mesh.cells[c][(k + 1) % 3]);
      auto [it, fresh] = edge_cells.try_emplace(key, static_cast<int>(c), -1);
      if (!fresh) it->second.second = static_cast<int>(c);
    }
  for (std::size_t c = 0; c < mesh.cells.size(); ++c)
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.cells[c][k], b = mesh.cells[c][(k + 1) % 3];
      if (edge_cells.at(detail::edge_key(a, b)).second >= 0) continue;
      auto it = constraint_of.find(detail::edge_key(parent[a], parent[b]));
      if (it == constraint_of.end() || constraints[it->second].label < 0)
        throw NumericalFailure("build_mesh: boundary edge off every boundary feature");
      const auto& con = constraints[it->second];
      BoundaryFacet f{{a, b}, static_cast<int>(c), 0u, con.label};
      const Point2 centroid = mesh.centroid(c);
      for (const auto& d : scene.dirichlet()) {
        if (geometry::point_segment_distance(mesh.vertices[a], d.segment) > tol ||
            geometry::point_segment_distance(mesh.vertices[b], d.segment) > tol)
          continue;
        if (con.slit && d.side != geometry::Side::both) {
          const bool left = cross(d.segment.b - d.segment.a, centroid - d.segment.a) > 0.0;
          if (left != (d.side == geometry::Side::left)) continue;
        }
        f.dirichlet |= 1u;
      }
      mesh.boundary.push_back(std::move(f));
    }
  mesh.validate();
  return mesh;
}

}  // namespace mixedreg::fem
