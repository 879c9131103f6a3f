#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/quadrature.hpp"
#include "mixedreg/geometry/segment_set.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace mixedreg::whitney {

using geometry::Segment;
using geometry::SegmentSet;

/// Gauss node on F: segment index, parameter t in ]0,1[, position and
/// arclength weight.
struct BoundaryNode {
  std::size_t segment;
  double t;
  Point2 point;
  double weight;
};

/// Gauss-Legendre nodes of the given order on every segment of F.
inline std::vector<BoundaryNode> boundary_nodes(const SegmentSet& set, int order = 8) {
  const GaussRule& rule = gauss_legendre(order);
  std::vector<BoundaryNode> nodes;
  for (std::size_t s = 0; s < set.size(); ++s) {
    const Segment& seg = set.segments()[s];
    if (seg.length() == 0.0) continue;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double t = 0.5 * (1.0 + rule.nodes[k]);
      nodes.push_back({s, t, seg.at(t), 0.5 * rule.weights[k] * seg.length()});
    }
  }
  return nodes;
}

/// A function f on F, given either as a callable or by its values at the
/// Gauss nodes of each segment (interpolated by the Lagrange polynomial
/// through those nodes).
class BoundaryFunction {
 public:
  using Callable = std::function<double(const Point2&)>;

  static BoundaryFunction from_callable(SegmentSet set, Callable f, std::optional<double> lipschitz_hint = {}) {
    require(static_cast<bool>(f), "BoundaryFunction: empty callable");
    BoundaryFunction b;
    b.set_ = std::move(set);
    b.callable_ = std::move(f);
    b.lipschitz_hint_ = lipschitz_hint;
    return b;
  }

  /// values are ordered as boundary_nodes(set, order).
  static BoundaryFunction from_samples(SegmentSet set, int order, std::vector<double> values,
                                       std::optional<double> lipschitz_hint = {}) {
    BoundaryFunction b;
    b.set_ = std::move(set);
    b.order_ = order;
    const auto nodes = boundary_nodes(b.set_, order);
    require(values.size() == nodes.size(), "BoundaryFunction: sample count does not match the node count");
    for (double v : values) require(std::isfinite(v), "BoundaryFunction: non-finite sample");
    b.values_ = std::move(values);
    b.offsets_.assign(b.set_.size(), std::numeric_limits<std::size_t>::max());
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (b.offsets_[nodes[k].segment] == std::numeric_limits<std::size_t>::max()) b.offsets_[nodes[k].segment] = k;
    b.lipschitz_hint_ = lipschitz_hint;
    return b;
  }

  const SegmentSet& set() const { return set_; }
  const std::optional<double>& lipschitz_hint() const { return lipschitz_hint_; }
  bool sampled() const { return !callable_; }

  /// Value at parameter t of segment s.
  double on_segment(std::size_t s, double t) const {
    if (callable_) return callable_(set_.segments()[s].at(t));
    const GaussRule& rule = gauss_legendre(order_);
    const std::size_t base = offsets_[s];
    // barycentric Lagrange interpolation in the variable ξ = 2t − 1
    const double xi = 2.0 * t - 1.0;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double diff = xi - rule.nodes[k];
      if (diff == 0.0) return values_[base + k];
      const double w = barycentric_weight(rule, k) / diff;
      num += w * values_[base + k];
      den += w;
    }
    return num / den;
  }

  /// Value at a point of F (within 1e-9 of the set's diameter).
  double operator()(const Point2& x) const {
    if (callable_) return callable_(x);
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < set_.size(); ++s) {
      const double d = geometry::point_segment_distance(x, set_.segments()[s]);
      if (d < bd && set_.segments()[s].length() > 0.0) {
        bd = d;
        best = s;
      }
    }
    require(bd <= 1e-9 * std::max(1.0, set_.diameter()), "BoundaryFunction: point is not on F");
    const Segment& seg = set_.segments()[best];
    const Point2 d = seg.b - seg.a;
    const double t = std::clamp((x - seg.a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return on_segment(best, t);
  }

 private:
  static double barycentric_weight(const GaussRule& rule, std::size_t k) {
    double w = 1.0;
    for (std::size_t j = 0; j < rule.size(); ++j)
      if (j != k) w /= (rule.nodes[k] - rule.nodes[j]);
    return w;
  }

  SegmentSet set_;
  Callable callable_;
  int order_ = 8;
  std::vector<double> values_;
  std::vector<std::size_t> offsets_;
  std::optional<double> lipschitz_hint_;
};

}  // namespace mixedreg::whitney
