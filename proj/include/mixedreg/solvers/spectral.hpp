#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/solvers/linear_map.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

namespace mixedreg::solvers {

struct LanczosOptions {
  int max_steps = 300;
  double tolerance = 1e-10;
  unsigned seed = 1;
};

/// Extreme Ritz values of a G-self-adjoint map B, with residual bounds
/// (each interval [θ − r, θ + r] contains an eigenvalue of B).
struct LanczosResult {
  double lo = 0.0, hi = 0.0;
  double lo_residual = 0.0, hi_residual = 0.0;
  int steps = 0;
  bool converged = false;
};

/// Lanczos in the G inner product with full reorthogonalization. Stops when
/// both extreme Ritz values are accurate to tolerance·scale, judged by the
/// residual or by r²/gap, or when a Krylov space becomes invariant.
template <class S>
LanczosResult g_lanczos(const std::function<Vector<S>(const Vector<S>&)>& b, const GramSolver<S>& g,
                        const LanczosOptions& opt = {}) {
  const Eigen::Index n = g.size();
  require(n > 0, "lanczos: empty space");
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opt.max_steps, n));
  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> nd;
  Vector<S> q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (is_complex_v<S>) q(i) = S(nd(rng), nd(rng));
    else q(i) = nd(rng);
  }
  q /= g.norm(q);
  std::vector<Vector<S>> basis{q};
  std::vector<Vector<S>> gbasis{g.multiply(q)};
  std::vector<double> alpha, beta;
  LanczosResult r;
  for (int j = 0; j < m_max; ++j) {
    Vector<S> w = b(basis[j]);
    const double a = std::real(gbasis[j].dot(w));
    alpha.push_back(a);
    // full reorthogonalization in the G inner product (twice is enough)
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < basis.size(); ++k) w -= gbasis[k].dot(w) * basis[k];
    const double bnext = g.norm(w);

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      t(k, k) = alpha[k];
      if (k + 1 < m) t(k, k + 1) = t(k + 1, k) = beta[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const auto& th = es.eigenvalues();
    const auto& y = es.eigenvectors();
    r.lo = th(0);
    r.hi = th(m - 1);
    r.lo_residual = bnext * std::abs(y(m - 1, 0));
    r.hi_residual = bnext * std::abs(y(m - 1, m - 1));
    r.steps = m;
    const double scale = std::max({std::abs(r.lo), std::abs(r.hi), 1e-300});
    const bool invariant = bnext <= 1e-13 * std::max(scale, std::abs(a));
    // Kato–Temple: the eigenvalue error is at most r²/gap
    auto settled = [&](double res, double gap) {
      return res <= opt.tolerance * scale || (gap > 0.0 && res * res / gap <= opt.tolerance * scale);
    };
    const double gap_lo = m > 1 ? th(1) - th(0) : 0.0;
    const double gap_hi = m > 1 ? th(m - 1) - th(m - 2) : 0.0;
    if (invariant || (j > 0 && settled(r.lo_residual, gap_lo) && settled(r.hi_residual, gap_hi))) {
      r.converged = true;
      return r;
    }
    beta.push_back(bnext);
    basis.push_back(w / bnext);
    gbasis.push_back(g.multiply(basis.back()));
  }
  return r;
}

namespace detail {

inline NumericalFailure lanczos_failure(const char* what, const LanczosResult& r) {
  std::ostringstream s;
  s << what << ": no convergence after " << r.steps << " steps; Rayleigh intervals [" << r.lo - r.lo_residual << ", "
    << r.lo + r.lo_residual << "] and [" << r.hi - r.hi_residual << ", " << r.hi + r.hi_residual << "]";
  return NumericalFailure(s.str());
}

}  // namespace detail

/// ‖Q‖_G = sup ‖Qa‖_G/‖a‖_G, from the largest eigenvalue of the G-adjoint
/// composition Q^♯Q with Q^♯ = G^{-1} Q^H G.
template <class S>
double operator_norm(const LinearMap<S>& q, const GramSolver<S>& g, const LanczosOptions& opt = {}) {
  require(q.size == g.size(), "operator_norm: map and Gram matrix sizes differ");
  auto composed = [&](const Vector<S>& x) -> Vector<S> { return g.solve(q.apply_adjoint(g.multiply(q.apply(x)))); };
  const auto r = g_lanczos<S>(composed, g, opt);
  if (!r.converged) throw detail::lanczos_failure("operator_norm", r);
  return std::sqrt(std::max(0.0, r.hi));
}

struct CoercivityEstimate {
  double kappa_hat = 0.0;
  double m_hat = 0.0;
  /// kappa_hat > 0; the contraction solver refuses non-coercive input.
  bool coercive = false;
};

/// κ̂ = min eigenvalue of (Hermitian part of A, G); M̂ = ‖G^{-1}A‖_G.
template <class S>
CoercivityEstimate estimate_coercivity(const fem::DiscreteOperator<S>& op, const LanczosOptions& opt = {}) {
  const GramSolver<S> g(op.G);
  const SparseMatrix<S> herm = (op.A + SparseMatrix<S>(op.A.adjoint())) * S(0.5);
  auto b = [&](const Vector<S>& x) -> Vector<S> { return g.solve(herm * x); };
  const auto r = g_lanczos<S>(b, g, opt);
  if (!r.converged) throw detail::lanczos_failure("estimate_coercivity", r);
  const LinearMap<S> ga{op.A.rows(), [&](const Vector<S>& x) { return Vector<S>(g.solve(op.A * x)); },
                        [&](const Vector<S>& x) { return Vector<S>(op.A.adjoint() * g.solve(x)); }};
  CoercivityEstimate e;
  e.kappa_hat = r.lo;
  e.m_hat = operator_norm(ga, g, opt);
  e.coercive = e.kappa_hat > 0.0;
  return e;
}

// Dense oracles for small problems.

/// Extreme generalized eigenvalues of the Hermitian pencil (H, G).
template <class S>
std::pair<double, double> dense_pencil_extremes(const DenseMatrix<S>& h, const DenseMatrix<S>& g) {
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix<S>> es(h, g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("dense pencil eigensolve failed");
  return {es.eigenvalues()(0), es.eigenvalues()(es.eigenvalues().size() - 1)};
}

/// ‖Q‖_G = ‖L^H Q L^{-H}‖_2 with G = L L^H.
template <class S>
double dense_g_norm(const DenseMatrix<S>& q, const DenseMatrix<S>& g) {
  Eigen::LLT<DenseMatrix<S>> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalFailure("dense_g_norm: G is not positive definite");
  const DenseMatrix<S> lh = llt.matrixU();
  const DenseMatrix<S> inner = lh * q * lh.inverse();
  Eigen::JacobiSVD<DenseMatrix<S>> svd(inner);
  return svd.singularValues()(0);
}

template <class S>
CoercivityEstimate dense_coercivity(const fem::DiscreteOperator<S>& op) {
  const DenseMatrix<S> a(op.A), g(op.G);
  const DenseMatrix<S> h = 0.5 * (a + a.adjoint());
  CoercivityEstimate e;
  e.kappa_hat = dense_pencil_extremes<S>(h, g).first;
  e.m_hat = dense_g_norm<S>(g.llt().solve(a), g);
  e.coercive = e.kappa_hat > 0.0;
  return e;
}

}  // namespace mixedreg::solvers
