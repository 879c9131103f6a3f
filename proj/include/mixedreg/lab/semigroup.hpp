#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/lab/sweep.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace mixedreg::lab {

struct SemigroupReport {
  double t = 0.0;
  /// ‖S(t) − S(t/3)³‖_G
  double semigroup_error = 0.0;
  /// ‖S(t) − Σ_j σ_j S(t/3)g_j ⊗ conj(S(t/3)^* f_j)‖_G
  double reconstruction_error = 0.0;
  /// Σ_j σ_j of S(t/3)
  double nuclear_norm = 0.0;
  std::vector<double> singular_values;
  /// axis j; columns sigma and w1q_<q> of the factor S(t/3) g_j
  SweepResult factors;
};

namespace detail {

template <class T>
double hermitian_norm(const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& x) {
  using M = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  const M h = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<M> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <class T>
SemigroupReport semigroup_dense(const fem::Mesh2& mesh, const fem::DiscreteOperator<Complex>& op, double t,
                                const std::vector<double>& qs, int factor_count) {
  using M = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using V = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  M a, g;
  if constexpr (is_complex_v<T>) {
    a = DenseMatrix<Complex>(op.A);
    g = DenseMatrix<Complex>(op.G);
  } else {
    a = DenseMatrix<Complex>(op.A).real();
    g = DenseMatrix<Complex>(op.G).real();
  }
  const Eigen::Index n = a.rows();
  Eigen::LLT<M> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalFailure("semigroup: G is not positive definite");
  const M l = llt.matrixL();
  // G-orthonormal coordinates: B = L^{-1} A L^{-H}
  M b = llt.matrixL().solve(a);
  b = llt.matrixL().solve(M(b.adjoint())).adjoint();
  b = 0.5 * (b + b.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<M> es(b);
  if (es.info() != Eigen::Success) throw NumericalFailure("semigroup: eigensolve failed");
  const M& w = es.eigenvectors();
  auto semigroup = [&](double tau) {
    const V e = (-tau * es.eigenvalues()).array().exp().template cast<T>();
    return M(w * e.asDiagonal() * w.adjoint());
  };
  const M st = semigroup(t), s3 = semigroup(t / 3.0);
  SemigroupReport r;
  r.t = t;
  r.semigroup_error = hermitian_norm<T>(M(st - s3 * s3 * s3));

  Eigen::BDCSVD<M> svd(s3, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const M left = s3 * svd.matrixU();               // S(t/3) g_j
  const M right = s3.adjoint() * svd.matrixV();    // S(t/3)^* f_j
  const M recon = left * sigma.template cast<T>().asDiagonal() * right.adjoint();
  const M diff = st - recon;
  r.reconstruction_error = Eigen::BDCSVD<M>(diff).singularValues()(0);
  r.nuclear_norm = sigma.sum();
  r.singular_values.assign(sigma.data(), sigma.data() + sigma.size());

  auto& f = r.factors;
  f.axis_name = "j";
  f.columns.push_back("sigma");
  for (double q : qs) {
    std::ostringstream s;
    s << "w1q_" << q;
    f.columns.push_back(s.str());
  }
  const Eigen::Index k = std::min<Eigen::Index>(factor_count, n);
  for (Eigen::Index j = 0; j < k; ++j) {
    // back to nodal coordinates: x = L^{-H} y
    const V y = left.col(j);
    const V x = l.adjoint().template triangularView<Eigen::Upper>().solve(y);
    const Vector<Complex> full = op.dofs.expand(Vector<Complex>(x.template cast<Complex>()));
    f.axis.push_back(static_cast<double>(j));
    std::vector<double> row{sigma(j)};
    for (double q : qs) row.push_back(fem::w1p_norm(mesh, full, q));
    f.values.push_back(row);
  }
  f.metadata = {{"t", std::to_string(t)}, {"dofs", std::to_string(n)}};
  f.validate();
  return r;
}

}  // namespace detail

/// Dense functional calculus for S(t) = exp(−t G^{-1}A) and the rank
/// decomposition S(t) = S(t/3) (Σ σ_j g_j ⊗ conj f_j) S(t/3) from the SVD of S(t/3).
inline SemigroupReport semigroup_kernel(const fem::Mesh2& mesh, const fem::DiscreteOperator<Complex>& op, double t,
                                        const std::vector<double>& qs = {2.0, 4.0}, int factor_count = 10) {
  require(t > 0.0 && std::isfinite(t), "semigroup: time must be positive");
  require(op.size() <= 2000, "semigroup: dense path limited to 2000 free dofs");
  for (double q : qs) require(q >= 1.0, "semigroup: exponents must be ≥ 1");
  const double asym = SparseMatrix<Complex>(op.A - SparseMatrix<Complex>(op.A.adjoint())).cwiseAbs().sum();
  if (asym > 1e-12 * op.A.cwiseAbs().sum())
    throw InvalidInput("semigroup: A is not Hermitian; the dense spectral path requires symmetric μ");
  const bool real = DenseMatrix<Complex>(op.A).imag().isZero(0.0) && DenseMatrix<Complex>(op.G).imag().isZero(0.0);
  return real ? detail::semigroup_dense<double>(mesh, op, t, qs, factor_count)
              : detail::semigroup_dense<Complex>(mesh, op, t, qs, factor_count);
}

}  // namespace mixedreg::lab
