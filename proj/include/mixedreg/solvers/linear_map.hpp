#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"

#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>

namespace mixedreg::solvers {

/// A linear map on C^n (or R^n) with its Euclidean adjoint.
template <class S>
struct LinearMap {
  Eigen::Index size = 0;
  std::function<Vector<S>(const Vector<S>&)> apply;
  std::function<Vector<S>(const Vector<S>&)> apply_adjoint;

  static LinearMap identity(Eigen::Index n) {
    auto id = [](const Vector<S>& x) { return x; };
    return {n, id, id};
  }
  static LinearMap zero(Eigen::Index n) {
    auto z = [](const Vector<S>& x) { return Vector<S>(Vector<S>::Zero(x.size())); };
    return {n, z, z};
  }
  static LinearMap from_matrix(const SparseMatrix<S>& m) {
    auto shared = std::make_shared<SparseMatrix<S>>(m);
    return {m.rows(), [shared](const Vector<S>& x) { return Vector<S>(*shared * x); },
            [shared](const Vector<S>& x) { return Vector<S>(shared->adjoint() * x); }};
  }
};

/// Cholesky factorization of the Gram matrix G, shared by the G-geometry
/// routines (inner products, Riesz map G^{-1}).
template <class S>
class GramSolver {
 public:
  explicit GramSolver(const SparseMatrix<S>& g) : g_(std::make_shared<SparseMatrix<S>>(g)) {
    require(g.rows() == g.cols(), "GramSolver: G must be square");
    llt_ = std::make_shared<Eigen::SimplicialLLT<SparseMatrix<S>>>(*g_);
    if (llt_->info() != Eigen::Success) throw NumericalFailure("GramSolver: G is not positive definite");
  }

  Eigen::Index size() const { return g_->rows(); }
  const SparseMatrix<S>& matrix() const { return *g_; }
  Vector<S> solve(const Vector<S>& b) const { return llt_->solve(b); }
  Vector<S> multiply(const Vector<S>& x) const { return *g_ * x; }
  S inner(const Vector<S>& x, const Vector<S>& y) const { return y.dot(*g_ * x); }
  double norm(const Vector<S>& x) const { return std::sqrt(std::max(0.0, std::real(x.dot(*g_ * x)))); }
  /// Norm in the G-dual space: sqrt(f^H G^{-1} f).
  double dual_norm(const Vector<S>& f) const { return std::sqrt(std::max(0.0, std::real(f.dot(solve(f))))); }

 private:
  std::shared_ptr<SparseMatrix<S>> g_;
  std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix<S>>> llt_;
};

}  // namespace mixedreg::solvers
