#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/geometry/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <utility>
#include <vector>

namespace mixedreg::geometry {

struct JonesOptions {
  std::uint64_t seed = 1;
  /// When set, first points are drawn from B(focus, focus_radius) ∩ Ω.
  std::optional<Point2> focus;
  double focus_radius = 0.0;
};

/// Sampled estimate of Jones' ε for a given δ. The estimate is a minimum over
/// finitely many pairs and path points, so it is biased upwards with respect
/// to the true infimum.
struct JonesReport {
  double epsilon_hat = std::numeric_limits<double>::infinity();
  double delta = 0.0;
  std::pair<Point2, Point2> worst_pair{Point2::Zero(), Point2::Zero()};
  bool feasible = false;
  std::size_t pairs = 0;
  std::size_t disconnected_pairs = 0;
};

namespace detail {

// Uniform bucket grid over the boundary segments for visibility queries.
class SegmentIndex {
 public:
  SegmentIndex(std::vector<Segment> segments, const Box& box, double cell)
      : segments_(std::move(segments)), lo_(box.lo), cell_(cell) {
    nx_ = std::max(1, static_cast<int>(std::ceil((box.hi.x() - box.lo.x()) / cell)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil((box.hi.y() - box.lo.y()) / cell)) + 1);
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      const Segment& s = segments_[k];
      const auto [i0, j0] = bucket(s.a.cwiseMin(s.b));
      const auto [i1, j1] = bucket(s.a.cwiseMax(s.b));
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(k);
    }
    stamp_.assign(segments_.size(), 0);
  }

  bool visible(const Point2& p, const Point2& q) const {
    ++epoch_;
    const auto [i0, j0] = bucket(p.cwiseMin(q));
    const auto [i1, j1] = bucket(p.cwiseMax(q));
    const Segment pq{p, q};
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        for (std::size_t k : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
          if (stamp_[k] == epoch_) continue;
          stamp_[k] = epoch_;
          if (segments_intersect(pq, segments_[k])) return false;
        }
    return true;
  }

  double distance(const Point2& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments_) d = std::min(d, point_segment_distance(p, s));
    return d;
  }

 private:
  std::pair<int, int> bucket(const Point2& p) const {
    const int i = std::clamp(static_cast<int>(std::floor((p.x() - lo_.x()) / cell_)), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y() - lo_.y()) / cell_)), 0, ny_ - 1);
    return {i, j};
  }

  std::vector<Segment> segments_;
  Point2 lo_;
  double cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
  mutable std::vector<std::uint64_t> stamp_;
  mutable std::uint64_t epoch_ = 0;
};

}  // namespace detail

/// Estimates ε in Jones' (ε, δ) condition from sampled point pairs joined by
/// grid-graph shortest paths (string-pulled afterwards).
inline JonesReport jones_check(const PlanarScene& scene, double delta, std::size_t pair_samples,
                               std::size_t path_resolution, const JonesOptions& options = {}) {
  require(delta > 0.0, "jones_check: delta must be positive");
  require(pair_samples >= 1 && path_resolution >= 1, "jones_check: sample counts must be >= 1");
  if (options.focus) require(options.focus_radius > 0.0, "jones_check: focus radius must be positive");

  const Box box = scene.bounding_box();
  const double extent = std::max(box.hi.x() - box.lo.x(), box.hi.y() - box.lo.y());
  const double h = extent / static_cast<double>(path_resolution);
  auto boundary = scene.boundary_set().segments();
  const detail::SegmentIndex index(boundary, {box.lo - Point2(h, h), box.hi + Point2(h, h)}, std::max(h, 1e-3 * extent));

  // grid nodes inside the domain
  const int nx = static_cast<int>(std::ceil((box.hi.x() - box.lo.x()) / h)) + 1;
  const int ny = static_cast<int>(std::ceil((box.hi.y() - box.lo.y()) / h)) + 1;
  std::vector<int> node_id(static_cast<std::size_t>(nx) * ny, -1);
  std::vector<Point2> nodes;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Point2 p = box.lo + Point2(i * h, j * h);
      if (scene.contains(p) && index.distance(p) > 1e-9 * extent) {
        node_id[static_cast<std::size_t>(j) * nx + i] = static_cast<int>(nodes.size());
        nodes.push_back(p);
      }
    }
  // 16-neighbourhood keeps the grid metric within a few percent of Euclidean
  static constexpr int offsets[8][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}, {2, -1}, {1, -2}};
  std::vector<std::vector<std::pair<int, double>>> adjacency(nodes.size() + 2);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = node_id[static_cast<std::size_t>(j) * nx + i];
      if (a < 0) continue;
      for (const auto& o : offsets) {
        const int ii = i + o[0], jj = j + o[1];
        if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
        const int b = node_id[static_cast<std::size_t>(jj) * nx + ii];
        if (b < 0 || !index.visible(nodes[a], nodes[b])) continue;
        const double w = (nodes[a] - nodes[b]).norm();
        adjacency[a].emplace_back(b, w);
        adjacency[b].emplace_back(a, w);
      }
    }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_in_disc = [&](const Point2& c, double r) -> std::optional<Point2> {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double rho = r * std::sqrt(unit(rng));
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const Point2 p = c + rho * Point2(std::cos(phi), std::sin(phi));
      if (scene.contains(p) && index.distance(p) > 1e-9 * extent) return p;
    }
    return std::nullopt;
  };
  auto sample_first = [&]() -> std::optional<Point2> {
    if (options.focus) return sample_in_disc(*options.focus, options.focus_radius);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const Point2 p(box.lo.x() + unit(rng) * (box.hi.x() - box.lo.x()), box.lo.y() + unit(rng) * (box.hi.y() - box.lo.y()));
      if (scene.contains(p) && index.distance(p) > 1e-9 * extent) return p;
    }
    return std::nullopt;
  };

  const int src = static_cast<int>(nodes.size());
  const int dst = src + 1;
  auto connect = [&](int virt, const Point2& p) {
    adjacency[virt].clear();
    const int ci = static_cast<int>(std::floor((p.x() - box.lo.x()) / h));
    const int cj = static_cast<int>(std::floor((p.y() - box.lo.y()) / h));
    for (int j = cj - 2; j <= cj + 3; ++j)
      for (int i = ci - 2; i <= ci + 3; ++i) {
        if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
        const int b = node_id[static_cast<std::size_t>(j) * nx + i];
        if (b >= 0 && index.visible(p, nodes[b])) adjacency[virt].emplace_back(b, (p - nodes[b]).norm());
      }
  };

  JonesReport report;
  report.delta = delta;
  report.feasible = true;
  std::vector<double> dist(nodes.size() + 2);
  std::vector<int> prev(nodes.size() + 2);
  for (std::size_t pair = 0; pair < pair_samples; ++pair) {
    const auto x = sample_first();
    if (!x) continue;
    const auto y = sample_in_disc(*x, delta);
    if (!y) continue;
    ++report.pairs;
    const double sep = (*x - *y).norm();
    if (sep == 0.0) continue;

    std::vector<Point2> path;
    if (index.visible(*x, *y)) {
      path = {*x, *y};
    } else {
      connect(src, *x);
      connect(dst, *y);
      std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
      std::fill(prev.begin(), prev.end(), -1);
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
      dist[src] = 0.0;
      queue.emplace(0.0, src);
      // the target's edges are stored on the target, so relax them from the node side
      std::vector<std::pair<int, double>> into_target = adjacency[dst];
      while (!queue.empty()) {
        const auto [d, a] = queue.top();
        queue.pop();
        if (d > dist[a]) continue;
        if (a == dst) break;
        auto relax = [&](int b, double w) {
          if (dist[a] + w < dist[b]) {
            dist[b] = dist[a] + w;
            prev[b] = a;
            queue.emplace(dist[b], b);
          }
        };
        for (const auto& [b, w] : adjacency[a]) relax(b, w);
        for (const auto& [b, w] : into_target)
          if (b == a) relax(dst, w);
      }
      if (prev[dst] < 0) {
        ++report.disconnected_pairs;
        report.feasible = false;
        report.epsilon_hat = 0.0;
        report.worst_pair = {*x, *y};
        continue;
      }
      std::vector<Point2> raw;
      for (int v = dst; v >= 0; v = prev[v]) raw.push_back(v == dst ? *y : v == src ? *x : nodes[v]);
      std::reverse(raw.begin(), raw.end());
      // string pulling: jump to the farthest visible vertex
      std::size_t at = 0;
      path.push_back(raw.front());
      while (at + 1 < raw.size()) {
        std::size_t next = at + 1;
        for (std::size_t k = raw.size() - 1; k > at + 1; --k)
          if (index.visible(raw[at], raw[k])) {
            next = k;
            break;
          }
        path.push_back(raw[next]);
        at = next;
      }
    }

    double length = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) length += (path[k + 1] - path[k]).norm();
    double eps = sep / length;
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
      for (int s = 0; s <= 8; ++s) {
        const Point2 z = path[k] + (s / 8.0) * (path[k + 1] - path[k]);
        const double dx = (*x - z).norm(), dy = (*y - z).norm();
        if (dx == 0.0 || dy == 0.0) continue;
        eps = std::min(eps, index.distance(z) * sep / (dx * dy));
      }
    if (eps < report.epsilon_hat) {
      report.epsilon_hat = eps;
      report.worst_pair = {*x, *y};
    }
  }
  if (report.pairs == 0) {
    report.epsilon_hat = 0.0;
    report.feasible = false;
  } else {
    report.feasible = report.feasible && report.epsilon_hat > 0.0;
  }
  return report;
}

}  // namespace mixedreg::geometry
