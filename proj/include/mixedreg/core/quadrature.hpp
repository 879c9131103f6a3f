#pragma once

#include "mixedreg/core/errors.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

namespace mixedreg {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline GaussRule make_gauss_rule(int order) {
  // legendre_p_zeros returns the nonnegative zeros in ascending order.
  const std::vector<double> positive = boost::math::legendre_p_zeros<double>(order);
  GaussRule rule;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
  }
  if (order % 2 == 1) rule.nodes.push_back(0.0);
  for (double x : positive) {
    if (x != 0.0) rule.nodes.push_back(x);
  }
  for (double x : rule.nodes) {
    const double dp = boost::math::legendre_p_prime<double>(order, x);
    rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return rule;
}

}  // namespace detail

/// Cached Gauss-Legendre rule of the given order (number of nodes).
inline const GaussRule& gauss_legendre(int order) {
  require(order >= 1 && order <= 64, "gauss_legendre: order must lie in [1, 64]");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, detail::make_gauss_rule(order)).first;
  return it->second;
}

/// Integrates f over [a, b] with an n-point Gauss rule.
template <class F>
double integrate_gauss(F&& f, double a, double b, int order = 8) {
  const GaussRule& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

}  // namespace mixedreg
