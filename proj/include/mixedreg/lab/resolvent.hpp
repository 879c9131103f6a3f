#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/lab/sweep.hpp"
#include "mixedreg/solvers/linear_map.hpp"
#include "mixedreg/solvers/spectral.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <string>
#include <vector>

namespace mixedreg::lab {

/// ‖f ↦ M (A + λM)^{-1} f‖ on the discrete W^{-1,2} space normed by G^{-1}.
inline double resolvent_norm(const fem::DiscreteOperator<Complex>& op, Complex lambda,
                             const solvers::LanczosOptions& lopt = {}) {
  require(lambda.real() >= 0.0, "resolvent: Re λ must be nonnegative");
  const SparseMatrix<Complex> shifted = op.A + lambda * op.mass;
  Eigen::SparseLU<SparseMatrix<Complex>> lu(shifted);
  if (lu.info() != Eigen::Success)
    throw NumericalFailure("resolvent: factorization of A + λM failed at λ = (" + std::to_string(lambda.real()) + ", " +
                           std::to_string(lambda.imag()) + "); the operator is not elliptic");
  const solvers::GramSolver<Complex> g(op.G);
  // with f = G y the dual norm of f is the G-norm of y
  const solvers::LinearMap<Complex> q{
      static_cast<Eigen::Index>(op.size()),
      [&](const Vector<Complex>& y) {
        return Vector<Complex>(g.solve(Vector<Complex>(op.mass * Vector<Complex>(lu.solve(g.multiply(y))))));
      },
      [&](const Vector<Complex>& y) {
        return Vector<Complex>(g.multiply(Vector<Complex>(lu.adjoint().solve(Vector<Complex>(op.mass * g.solve(y))))));
      }};
  return solvers::operator_norm(q, g, lopt);
}

struct ResolventSweep {
  /// axis: grid index; columns re, im, abs, norm, scaled = (1 + |λ|)·norm
  SweepResult table;
  double sup_scaled = 0.0;
};

inline ResolventSweep resolvent_sweep(const fem::DiscreteOperator<Complex>& op, const std::vector<Complex>& lambdas,
                                      int threads = 1) {
  require(!lambdas.empty(), "resolvent_sweep: empty λ grid");
  for (const auto& l : lambdas) require(l.real() >= 0.0 && std::isfinite(std::abs(l)), "resolvent_sweep: Re λ ≥ 0 required");
  const auto norms = parallel_map<double>(
      lambdas.size(), [&](std::size_t i) { return resolvent_norm(op, lambdas[i]); }, threads);
  ResolventSweep r;
  r.table.axis_name = "index";
  r.table.columns = {"re", "im", "abs", "norm", "scaled"};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double scaled = (1.0 + std::abs(lambdas[i])) * norms[i];
    r.table.axis.push_back(static_cast<double>(i));
    r.table.values.push_back({lambdas[i].real(), lambdas[i].imag(), std::abs(lambdas[i]), norms[i], scaled});
    r.sup_scaled = std::max(r.sup_scaled, scaled);
  }
  r.table.metadata["sup_scaled"] = std::to_string(r.sup_scaled);
  r.table.validate();
  return r;
}

/// λ on the rays arg λ ∈ {0, ±π/4, ±0.99·π/2} with the given moduli, plus λ = 0.
inline std::vector<Complex> ray_grid(const std::vector<double>& moduli = {1.0, 10.0, 100.0, 1e3, 1e4}) {
  const double half = 2.0 * std::atan(1.0);
  std::vector<Complex> out{Complex(0.0)};
  for (double arg : {0.0, 0.5 * half, -0.5 * half, 0.99 * half, -0.99 * half})
    for (double r : moduli) out.push_back(std::polar(r, arg));
  return out;
}

}  // namespace mixedreg::lab
