#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"

#include <Eigen/SparseLU>

#include <random>
#include <string>

namespace mixedreg::solvers {

/// Raised when the system matrix is numerically singular; carries a unit
/// vector v with ‖A v‖ ≈ 0.
template <class S>
class SingularOperator : public NumericalFailure {
 public:
  SingularOperator(const std::string& what, Vector<S> near_null, double ratio)
      : NumericalFailure(what), near_null_(std::move(near_null)), ratio_(ratio) {}
  const Vector<S>& near_null() const { return near_null_; }
  /// ‖A v‖ / ‖A‖ for the reported vector.
  double ratio() const { return ratio_; }

 private:
  Vector<S> near_null_;
  double ratio_;
};

struct DirectOptions {
  /// ‖A v‖ ≤ singular_tolerance·‖A‖ for some unit v declares A singular.
  double singular_tolerance = 1e-10;
  double residual_tolerance = 1e-12;
};

/// Sparse LU solve of A u = f with a singularity probe by inverse iteration.
template <class S>
Vector<S> solve_direct(const SparseMatrix<S>& a, const Vector<S>& f, const DirectOptions& opt = {}) {
  require(a.rows() == a.cols() && a.rows() == f.size(), "solve_direct: dimension mismatch");
  const double scale = [&] {
    double m = 0.0;
    for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
      double col = 0.0;
      for (typename SparseMatrix<S>::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
      m = std::max(m, col);
    }
    return m;
  }();
  Eigen::SparseLU<SparseMatrix<S>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  std::mt19937 rng(12345);
  std::normal_distribution<double> g;
  Vector<S> v(a.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = S(g(rng));
  if (lu.info() != Eigen::Success) {
    v.normalize();
    throw SingularOperator<S>("solve_direct: factorization failed (" + lu.lastErrorMessage() + ")", v, 0.0);
  }
  // inverse iteration: a few steps expose a (near) null direction
  double ratio = 0.0;
  for (int k = 0; k < 3; ++k) {
    v = lu.solve(v);
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) break;
    v /= n;
    ratio = (a * v).norm() / std::max(scale, 1e-300);
  }
  if (ratio <= opt.singular_tolerance || !v.allFinite())
    throw SingularOperator<S>("solve_direct: operator is singular, ‖Av‖/‖A‖ = " + std::to_string(ratio) +
                                  " for the reported near-null vector",
                              v, ratio);
  Vector<S> u = lu.solve(f);
  const double fn = f.norm();
  const double res = (a * u - f).norm();
  if (fn > 0.0 && res > opt.residual_tolerance * fn) {
    // one step of iterative refinement
    u += Vector<S>(lu.solve(Vector<S>(f - a * u)));
  }
  return u;
}

}  // namespace mixedreg::solvers
