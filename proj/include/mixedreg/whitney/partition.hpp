#pragma once

#include "mixedreg/whitney/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mixedreg::whitney {

namespace detail {

inline double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

// 1 on |t| ≤ 1/4, 0 on |t| ≥ ι/2, C² in between.
inline double bump_profile(double t) {
  const double a = std::abs(t);
  const double u = (a - 0.25) / (0.5 * expansion - 0.25);
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return 1.0 - smoothstep(smoothstep(u));
}

}  // namespace detail

/// ψ_i(x): tensor-product bump supported on Q_i^*, equal to 1 on the inner half of Q_i.
inline double bump(const Cube& q, const Point2& x) {
  const Point2 t = (x - q.center) / q.side;
  return detail::bump_profile(t.x()) * detail::bump_profile(t.y());
}

/// True when x lies in the closed expanded cube Q^*.
inline bool in_expanded(const Cube& q, const Point2& x) {
  const Point2 t = (x - q.center) / q.side;
  return std::max(std::abs(t.x()), std::abs(t.y())) <= 0.5 * expansion;
}

struct PartitionWeight {
  Cube cube;
  double value;
};

/// φ_i = ψ_i / Σ_k ψ_k evaluated on demand. Only the cube containing x and its
/// touching neighbours can have expanded cubes reaching x, because touching
/// sides differ by at most a factor 4 and ι/2 − 1/2 = 1/16.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(DyadicGrid grid, int max_depth = max_lookup_depth)
      : grid_(std::move(grid)), max_depth_(max_depth) {}
  explicit PartitionOfUnity(const WhitneyDecomposition& w, int max_depth = max_lookup_depth)
      : PartitionOfUnity(w.grid, max_depth) {}

  const DyadicGrid& grid() const { return grid_; }

  /// Cubes whose expanded cube contains x (the candidates of the sum).
  std::vector<Cube> candidates(const Point2& x) const {
    const Cube home = home_cube(x);
    std::vector<Cube> out{home};
    for (const Cube& n : grid_.touching(home, max_depth_))
      if (in_expanded(n, x)) out.push_back(n);
    return out;
  }

  /// Nonzero weights φ_i(x); their sum is 1.
  std::vector<PartitionWeight> operator()(const Point2& x) const {
    std::vector<PartitionWeight> w;
    double total = 0.0;
    for (const Cube& q : candidates(x)) {
      const double v = bump(q, x);
      if (v > 0.0) {
        w.push_back({q, v});
        total += v;
      }
    }
    if (!(total > 0.0)) throw NumericalFailure("partition of unity vanishes at a covered point");
    for (auto& e : w) e.value /= total;
    return w;
  }

 private:
  Cube home_cube(const Point2& x) const {
    require(grid_.root().contains(x), "partition of unity: point outside the bounding box");
    require(dist_to_set(x, grid_.set()) > 0.0, "partition of unity: undefined on F");
    auto q = grid_.locate(x, max_depth_);
    if (!q) throw NumericalFailure("partition of unity: point closer to F than the lookup depth resolves");
    return *q;
  }

  DyadicGrid grid_;
  int max_depth_;
};

}  // namespace mixedreg::whitney
