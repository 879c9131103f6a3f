#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/geometry/segment_set.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mixedreg::whitney {

using geometry::Box;
using geometry::SegmentSet;

/// Expansion factor ι of Q_i^* about the cube center, inside ]1, 5/4[.
inline constexpr double expansion = 9.0 / 8.0;

/// Observed cap on the number of expanded cubes containing a point in 2D.
inline constexpr int overlap_cap = 12;

/// Deepest level an on-demand lookup descends to. Integer cube coordinates
/// stay exactly representable as doubles below 2^53.
inline constexpr int max_lookup_depth = 52;

struct Cube {
  int level = 0;
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  Point2 center = Point2::Zero();
  double side = 0.0;
  /// l_i = s_i·√2
  double diam = 0.0;
  Box box{};

  bool same(const Cube& o) const { return level == o.level && ix == o.ix && iy == o.iy; }
};

/// Dyadic subdivision of a square root box together with the acceptance rule
/// diam Q ≤ d(Q, F). The rule is a pure function of the cube, so the tree is
/// implicit and can be descended to any depth on demand.
class DyadicGrid {
 public:
  DyadicGrid() = default;
  DyadicGrid(Box root, SegmentSet set) : root_(root), set_(std::move(set)) {
    side_ = root_.hi.x() - root_.lo.x();
    require(!set_.empty(), "whitney: F is empty");
    require(side_ > 0.0 && std::abs((root_.hi.y() - root_.lo.y()) - side_) <= 1e-12 * side_,
            "whitney: bounding box must be a square");
    for (const auto& s : set_.segments())
      for (const Point2& p : {s.a, s.b})
        require(p.x() > root_.lo.x() && p.x() < root_.hi.x() && p.y() > root_.lo.y() && p.y() < root_.hi.y(),
                "whitney: F must lie in the interior of the bounding box");
  }

  const Box& root() const { return root_; }
  const SegmentSet& set() const { return set_; }

  Cube cube(int level, std::int64_t ix, std::int64_t iy) const {
    const double step = std::ldexp(side_, -level);
    Cube q;
    q.level = level;
    q.ix = ix;
    q.iy = iy;
    q.box.lo = root_.lo + Point2(static_cast<double>(ix) * step, static_cast<double>(iy) * step);
    q.box.hi = root_.lo + Point2(static_cast<double>(ix + 1) * step, static_cast<double>(iy + 1) * step);
    q.center = 0.5 * (q.box.lo + q.box.hi);
    q.side = step;
    q.diam = step * std::numbers::sqrt2;
    return q;
  }

  double distance(const Cube& q) const { return set_.distance_to_box(q.box); }
  bool accepted(const Cube& q) const { return q.diam <= distance(q); }

  /// The accepted cube containing x, or nothing when x is outside the root
  /// box or closer to F than the lookup depth resolves.
  std::optional<Cube> locate(const Point2& x, int max_depth = max_lookup_depth) const {
    if (!root_.contains(x)) return std::nullopt;
    Cube q = cube(0, 0, 0);
    while (!accepted(q)) {
      if (q.level >= max_depth) return std::nullopt;
      const Cube mid = cube(q.level + 1, 2 * q.ix + 1, 2 * q.iy + 1);
      const int bx = x.x() >= mid.box.lo.x() ? 1 : 0;
      const int by = x.y() >= mid.box.lo.y() ? 1 : 0;
      q = cube(q.level + 1, 2 * q.ix + bx, 2 * q.iy + by);
    }
    return q;
  }

  /// Accepted cubes whose closed boxes meet the closed box of q (q excluded).
  std::vector<Cube> touching(const Cube& q, int max_depth = max_lookup_depth) const {
    std::vector<Cube> out;
    // Touching cubes are at most 4 times larger, so they live below the 3×3
    // block of level-(L−2) cells around q, provided those cells' parents are
    // rejected; otherwise search from the root.
    const int top = q.level - 2;
    if (top >= 1) {
      const std::int64_t n = std::int64_t{1} << top;
      const std::int64_t ax = q.ix >> 2, ay = q.iy >> 2;
      std::vector<Cube> starts;
      bool local = true;
      for (std::int64_t dx = -1; dx <= 1 && local; ++dx)
        for (std::int64_t dy = -1; dy <= 1 && local; ++dy) {
          const std::int64_t x = ax + dx, y = ay + dy;
          if (x < 0 || y < 0 || x >= n || y >= n) continue;
          if (accepted(cube(top - 1, x >> 1, y >> 1))) local = false;
          starts.push_back(cube(top, x, y));
        }
      if (local) {
        for (const Cube& c : starts) collect_touching(c, q, max_depth, out);
        return out;
      }
    }
    collect_touching(cube(0, 0, 0), q, max_depth, out);
    return out;
  }

  /// Closed integer boxes of a and b intersect.
  static bool closed_boxes_meet(const Cube& a, const Cube& b) {
    const int l = std::max(a.level, b.level);
    const std::int64_t sa = std::int64_t{1} << (l - a.level);
    const std::int64_t sb = std::int64_t{1} << (l - b.level);
    auto meet = [](std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) { return a0 <= b1 && b0 <= a1; };
    return meet(a.ix * sa, (a.ix + 1) * sa, b.ix * sb, (b.ix + 1) * sb) &&
           meet(a.iy * sa, (a.iy + 1) * sa, b.iy * sb, (b.iy + 1) * sb);
  }

 private:
  void collect_touching(const Cube& node, const Cube& q, int max_depth, std::vector<Cube>& out) const {
    if (!closed_boxes_meet(node, q)) return;
    if (node.same(q)) return;
    // ancestors of q are rejected by construction
    const bool ancestor = node.level < q.level && (q.ix >> (q.level - node.level)) == node.ix &&
                          (q.iy >> (q.level - node.level)) == node.iy;
    if (!ancestor && accepted(node)) {
      out.push_back(node);
      return;
    }
    if (node.level >= max_depth) return;
    for (int c = 0; c < 4; ++c) collect_touching(cube(node.level + 1, 2 * node.ix + (c & 1), 2 * node.iy + (c >> 1)), q, max_depth, out);
  }

  Box root_{};
  SegmentSet set_;
  double side_ = 0.0;
};

struct DecomposeOptions {
  /// Largest admissible uncovered area (cubes left at max_level) relative to
  /// the root box area.
  double max_uncovered_fraction = 0.02;
};

struct WhitneyDecomposition {
  DyadicGrid grid;
  int max_level = 0;
  double iota = expansion;
  std::vector<Cube> cubes;
  /// Indices of cubes with side ≤ 1.
  std::vector<std::size_t> small_index;
  /// Index pairs (i < k) of touching cubes.
  std::vector<std::pair<std::size_t, std::size_t>> adjacency;
  /// c_i = 1/ρ(B(x_i, 6 l_i)); infinite when the ball carries no measure.
  std::vector<double> weights;
  std::size_t discarded = 0;
  double uncovered_area = 0.0;
};

/// Explicit Whitney decomposition of root \ F down to max_level. Cubes still
/// rejected at max_level are discarded and their area reported.
inline WhitneyDecomposition decompose(const SegmentSet& set, const Box& root, int max_level,
                                      const DecomposeOptions& options = {}) {
  require(max_level >= 0 && max_level <= max_lookup_depth, "decompose: max_level out of range");
  WhitneyDecomposition w;
  w.grid = DyadicGrid(root, set);
  w.max_level = max_level;

  std::unordered_map<std::int64_t, std::size_t> index_of;
  auto key = [&](const Cube& q) {
    // unique for level ≤ 27; deeper decompositions fall back to a linear search
    return (static_cast<std::int64_t>(q.level) << 56) ^ (q.ix << 28) ^ q.iy;
  };
  const bool hashable = max_level <= 27;

  std::deque<Cube> queue{w.grid.cube(0, 0, 0)};
  while (!queue.empty()) {
    const Cube q = queue.front();
    queue.pop_front();
    if (w.grid.accepted(q)) {
      if (hashable) index_of.emplace(key(q), w.cubes.size());
      w.cubes.push_back(q);
    } else if (q.level == max_level) {
      ++w.discarded;
      w.uncovered_area += q.side * q.side;
    } else {
      for (int c = 0; c < 4; ++c) queue.push_back(w.grid.cube(q.level + 1, 2 * q.ix + (c & 1), 2 * q.iy + (c >> 1)));
    }
  }
  const double root_area = std::pow(root.hi.x() - root.lo.x(), 2);
  if (w.uncovered_area > options.max_uncovered_fraction * root_area)
    throw NumericalFailure("decompose: max_level " + std::to_string(max_level) + " leaves uncovered area " +
                           std::to_string(w.uncovered_area));

  for (std::size_t i = 0; i < w.cubes.size(); ++i) {
    const Cube& q = w.cubes[i];
    if (q.side <= 1.0) w.small_index.push_back(i);
    const double mass = set.measure_in_disc(q.center, 6.0 * q.diam);
    w.weights.push_back(mass > 0.0 ? 1.0 / mass : std::numeric_limits<double>::infinity());
    for (const Cube& n : w.grid.touching(q, max_level)) {
      std::size_t k = w.cubes.size();
      if (hashable) {
        if (auto it = index_of.find(key(n)); it != index_of.end()) k = it->second;
      } else {
        for (std::size_t j = 0; j < w.cubes.size(); ++j)
          if (w.cubes[j].same(n)) k = j;
      }
      if (k < w.cubes.size() && i < k) w.adjacency.emplace_back(i, k);
    }
  }
  return w;
}

/// CSV dump for plotting: center_x,center_y,side,level
inline void write_csv(std::ostream& out, const WhitneyDecomposition& w) {
  out << "center_x,center_y,side,level\n" << std::setprecision(17);
  for (const Cube& q : w.cubes) out << q.center.x() << ',' << q.center.y() << ',' << q.side << ',' << q.level << '\n';
}

}  // namespace mixedreg::whitney
