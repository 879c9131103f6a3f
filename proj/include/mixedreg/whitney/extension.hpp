#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/quadrature.hpp"
#include "mixedreg/whitney/boundary_function.hpp"
#include "mixedreg/whitney/decomposition.hpp"
#include "mixedreg/whitney/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace mixedreg::whitney {

/// E_F f(x) = Σ_{i∈I} φ_i(x) c_i ∫_{|t−x_i|≤6 l_i} f dρ off F, and f(x) on F.
class Extension {
 public:
  Extension(BoundaryFunction f, const WhitneyDecomposition& w, int order = 8)
      : f_(std::move(f)), phi_(w.grid), order_(order) {
    const SegmentSet& set = w.grid.set();
    require(set.total_length() > 0.0, "extend: F carries no arclength");
    require(f_.set().size() == set.size() && std::abs(f_.set().total_length() - set.total_length()) <=
                                                  1e-12 * set.total_length(),
            "extend: boundary function lives on a different set");
    gauss_legendre(order_);
  }

  const BoundaryFunction& boundary_function() const { return f_; }

  /// c_i ∫_{B(x_i, 6 l_i)} f dρ for one cube.
  double ring_average(const Cube& q) const {
    const SegmentSet& set = phi_.grid().set();
    const GaussRule& rule = gauss_legendre(order_);
    double integral = 0.0, mass = 0.0;
    for (const auto& piece : set.clip_to_disc(q.center, 6.0 * q.diam)) {
      const double len = set.segments()[piece.segment].length();
      const double half = 0.5 * (piece.t1 - piece.t0);
      const double mid = 0.5 * (piece.t0 + piece.t1);
      double sum = 0.0;
      for (std::size_t k = 0; k < rule.size(); ++k) sum += rule.weights[k] * f_.on_segment(piece.segment, mid + half * rule.nodes[k]);
      integral += sum * half * len;
      mass += 2.0 * half * len;
    }
    if (!(mass > 0.0))
      throw NumericalFailure("extend: ρ(B(x_i, 6 l_i)) = 0, the decomposition violates the Whitney condition");
    return integral / mass;
  }

  double operator()(const Point2& x) const {
    // points within rounding distance of F count as points of F
    const SegmentSet& set = phi_.grid().set();
    if (dist_to_set(x, set) <= 1e-13 * std::max(1.0, set.diameter())) return f_(x);
    double value = 0.0;
    for (const auto& [cube, weight] : phi_(x))
      if (cube.side <= 1.0) value += weight * ring_average(cube);
    return value;
  }

 private:
  BoundaryFunction f_;
  PartitionOfUnity phi_;
  int order_;
};

inline Extension extend(BoundaryFunction f, const SegmentSet& set, const WhitneyDecomposition& w, int order = 8) {
  require(set.size() == w.grid.set().size(), "extend: decomposition was built for a different set");
  return Extension(std::move(f), w, order);
}

struct RestrictOptions {
  /// Gauss order of the nodes on F (and of the returned samples).
  int order = 8;
  /// Relative oscillation between the two smallest radii above which a node is flagged.
  double tolerance = 1e-3;
  /// Gauss points per angular panel and in the radial direction.
  int angular_order = 8;
  int radial_order = 8;
};

struct RestrictResult {
  BoundaryFunction trace;
  /// Node indices (in boundary_nodes order) whose averages did not settle.
  std::vector<std::size_t> flagged;
  /// Ball averages per node and radius, row-major in the node index.
  std::vector<std::vector<double>> averages;
};

namespace detail {

// Directions (angles) of F leaving y inside B(y, r): the places where u may jump.
inline std::vector<double> split_angles(const SegmentSet& set, const Point2& y, double r) {
  std::vector<double> angles{0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi};
  const double tol = 1e-9 * r;
  for (const auto& s : set.segments()) {
    if (s.length() == 0.0 || geometry::point_segment_distance(y, s) > tol) continue;
    for (const Point2& end : {s.a, s.b}) {
      const Point2 d = end - y;
      if (d.norm() <= tol) continue;
      double a = std::atan2(d.y(), d.x());
      if (a < 0.0) a += 2.0 * std::numbers::pi;
      angles.push_back(a);
    }
  }
  std::sort(angles.begin(), angles.end());
  std::vector<double> unique;
  for (double a : angles)
    if (unique.empty() || a - unique.back() > 1e-12) unique.push_back(a);
  return unique;
}

}  // namespace detail

/// (1/|B(y,r)|) ∫_{B(y,r)} u by polar Gauss quadrature with angular panels
/// split along F.
inline double ball_average(const std::function<double(const Point2&)>& u, const SegmentSet& set, const Point2& y,
                           double r, int angular_order = 8, int radial_order = 8) {
  const GaussRule& ga = gauss_legendre(angular_order);
  const GaussRule& gr = gauss_legendre(radial_order);
  auto angles = detail::split_angles(set, y, r);
  angles.push_back(angles.front() + 2.0 * std::numbers::pi);
  double sum = 0.0;
  for (std::size_t p = 0; p + 1 < angles.size(); ++p) {
    const double h = 0.5 * (angles[p + 1] - angles[p]);
    const double m = 0.5 * (angles[p + 1] + angles[p]);
    for (std::size_t a = 0; a < ga.size(); ++a) {
      const double theta = m + h * ga.nodes[a];
      const Point2 e(std::cos(theta), std::sin(theta));
      double radial = 0.0;
      for (std::size_t k = 0; k < gr.size(); ++k) {
        const double rho = 0.5 * r * (1.0 + gr.nodes[k]);
        radial += gr.weights[k] * rho * u(y + rho * e);
      }
      sum += ga.weights[a] * h * radial * 0.5 * r;
    }
  }
  return sum / (std::numbers::pi * r * r);
}

/// R_F u at the Gauss nodes of F: ball averages over the radius schedule,
/// extrapolated by second-order Richardson over the two smallest radii (ball
/// averages of smooth functions are even in r). An empty schedule means
/// {2e-10, 1e-10}·diam F.
inline RestrictResult restrict(const std::function<double(const Point2&)>& u, const SegmentSet& set,
                               std::span<const double> r_schedule = {}, const RestrictOptions& options = {}) {
  require(!set.empty() && set.total_length() > 0.0, "restrict: F carries no arclength");
  std::vector<double> radii(r_schedule.begin(), r_schedule.end());
  if (radii.empty()) radii = {2e-10 * set.diameter(), 1e-10 * set.diameter()};
  require(radii.size() >= 2, "restrict: the radius schedule needs two radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    require(radii[k] > 0.0, "restrict: radii must be positive");
    if (k > 0) require(radii[k] < radii[k - 1], "restrict: radii must be decreasing");
  }
  const auto nodes = boundary_nodes(set, options.order);
  std::vector<double> values(nodes.size());
  RestrictResult result{BoundaryFunction{}, {}, {}};
  result.averages.resize(nodes.size());
  const double r1 = radii[radii.size() - 2], r2 = radii.back();
  const double q2 = (r1 / r2) * (r1 / r2);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    auto& avg = result.averages[n];
    for (double r : radii) avg.push_back(ball_average(u, set, nodes[n].point, r, options.angular_order, options.radial_order));
    const double a1 = avg[avg.size() - 2], a2 = avg.back();
    values[n] = (q2 * a2 - a1) / (q2 - 1.0);
    if (!std::isfinite(values[n]) || std::abs(a1 - a2) > options.tolerance * std::max(1.0, std::abs(a2)))
      result.flagged.push_back(n);
  }
  for (double& v : values)
    if (!std::isfinite(v)) v = 0.0;
  result.trace = BoundaryFunction::from_samples(set, options.order, std::move(values));
  return result;
}

/// 𝒫u = u − E_F R_F u.
class Projection {
 public:
  Projection(std::function<double(const Point2&)> u, const WhitneyDecomposition& w,
             std::span<const double> r_schedule = {}, const RestrictOptions& options = {})
      : u_(std::move(u)),
        trace_(restrict(u_, w.grid.set(), r_schedule, options)),
        correction_(trace_.trace, w) {}

  const RestrictResult& trace() const { return trace_; }

  double operator()(const Point2& x) const { return u_(x) - correction_(x); }

 private:
  std::function<double(const Point2&)> u_;
  RestrictResult trace_;
  Extension correction_;
};

inline Projection project(std::function<double(const Point2&)> u, const SegmentSet& set, const WhitneyDecomposition& w,
                          std::span<const double> r_schedule = {}, const RestrictOptions& options = {}) {
  require(set.size() == w.grid.set().size(), "project: decomposition was built for a different set");
  return Projection(std::move(u), w, r_schedule, options);
}

}  // namespace mixedreg::whitney
