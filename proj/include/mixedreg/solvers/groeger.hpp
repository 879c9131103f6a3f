#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/solvers/linear_map.hpp"
#include "mixedreg/solvers/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace mixedreg::solvers {

struct SolveReport {
  int iterations = 0;
  /// ‖A u_k − f‖ in the G-dual norm, one entry per iterate.
  std::vector<double> residual_history;
  /// max over steps of ‖u_{k+1} − u_k‖_G / ‖u_k − u_{k−1}‖_G.
  double observed_rate = 0.0;
  double t0 = 0.0;
  double rate_bound = 0.0;
  double kappa = 0.0;
  double m = 0.0;
  bool converged = false;

  nlohmann::json to_json() const {
    return {{"iterations", iterations},   {"residual_history", residual_history},
            {"observed_rate", observed_rate}, {"t0", t0},
            {"rate_bound", rate_bound},   {"kappa", kappa},
            {"M", m},                     {"converged", converged}};
  }
};

template <class S>
struct GroegerOptions {
  double tolerance = 1e-10;
  int max_iterations = 100000;
  /// Steps with observed rate ≥ 1 in a row that count as divergence.
  int divergence_window = 10;
  /// Steps shorter than rate_floor·‖u‖_G are left out of observed_rate.
  double rate_floor = 1e-6;
  /// Called with (k, u_k) after every update.
  std::function<void(int, const Vector<S>&)> observer;
};

/// t₀ = 2/(κ + M) and the certified rate (M − κ)/(M + κ).
inline std::pair<double, double> groeger_step(double kappa, double m) {
  require(kappa > 0.0 && m >= kappa && std::isfinite(m), "groeger: need 0 < κ ≤ M < ∞");
  return {2.0 / (kappa + m), (m - kappa) / (m + kappa)};
}

/// Fixed-point iteration u ← u − t₀ G^{-1}(A u − f), G^{-1} from one Cholesky
/// factorization. Stops when ‖u_{k+1} − u_k‖_G ≤ tol·‖u_k‖_G.
template <class S>
std::pair<Vector<S>, SolveReport> groeger_solve(const fem::DiscreteOperator<S>& op, const Vector<S>& f, double kappa,
                                                double m, const GroegerOptions<S>& opt = {}) {
  require(f.size() == op.A.rows(), "groeger_solve: load vector size mismatch");
  require(opt.tolerance > 0.0, "groeger_solve: tolerance must be positive");
  if (op.dofs.components() > 1) {
    const double asym = SparseMatrix<S>(op.A - SparseMatrix<S>(op.A.adjoint())).norm();
    if (asym > 1e-12 * op.A.norm())
      throw InvalidInput("groeger_solve: nonsymmetric systems are refused (the contraction rate is only certified "
                         "under the symmetry hypothesis)");
  }
  const auto [t0, bound] = groeger_step(kappa, m);
  const GramSolver<S> g(op.G);
  SolveReport rep;
  rep.t0 = t0;
  rep.rate_bound = bound;
  rep.kappa = kappa;
  rep.m = m;
  Vector<S> u = Vector<S>::Zero(f.size());
  double prev_step = -1.0;
  int bad_run = 0;
  for (int k = 0; k <= opt.max_iterations; ++k) {
    const Vector<S> r = g.solve(Vector<S>(op.A * u - f));
    rep.residual_history.push_back(g.norm(r));
    const double unorm = g.norm(u);
    const Vector<S> step = -t0 * r;
    const double sn = g.norm(step);
    if (prev_step > 0.0) {
      const double rate = sn / prev_step;
      // once steps approach the cancellation level of A u − f their ratios are noise
      if (prev_step > opt.rate_floor * std::max(unorm, 1e-300)) rep.observed_rate = std::max(rep.observed_rate, rate);
      bad_run = rate >= 1.0 ? bad_run + 1 : 0;
      if (bad_run >= opt.divergence_window)
        throw NumericalFailure("groeger_solve: diverging (rate ≥ 1 for " + std::to_string(bad_run) +
                               " steps); re-estimate κ and M");
    }
    if (sn <= opt.tolerance * unorm || sn == 0.0) {
      u += step;
      if (opt.observer) opt.observer(k + 1, u);
      rep.iterations = k;
      rep.converged = true;
      return {u, rep};
    }
    u += step;
    prev_step = sn;
    if (opt.observer) opt.observer(k + 1, u);
  }
  throw NumericalFailure("groeger_solve: no convergence within " + std::to_string(opt.max_iterations) + " iterations");
}

/// As above with κ, M estimated and widened by 1% on each side.
template <class S>
std::pair<Vector<S>, SolveReport> groeger_solve(const fem::DiscreteOperator<S>& op, const Vector<S>& f,
                                                const GroegerOptions<S>& opt = {}) {
  const auto e = estimate_coercivity(op);
  if (!e.coercive) throw InvalidInput("groeger_solve: operator is not coercive (κ̂ ≤ 0)");
  return groeger_solve(op, f, 0.99 * e.kappa_hat, 1.01 * e.m_hat, opt);
}

}  // namespace mixedreg::solvers
