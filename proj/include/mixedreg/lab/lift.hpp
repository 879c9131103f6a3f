#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/coefficient.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace mixedreg::lab {

template <int Dim>
struct LiftedCoefficient {
  using Matrix = Eigen::Matrix<Complex, Dim + 1, Dim + 1>;
  std::vector<Matrix> cells;
  Complex lambda;
  double kappa_tilde = 0.0;
  double bound_tilde = 0.0;

  /// Zero couplings between the first Dim coordinates and the last one.
  bool block_structure_exact() const {
    for (const auto& m : cells)
      for (int k = 0; k < Dim; ++k)
        if (m(k, Dim) != Complex(0.0) || m(Dim, k) != Complex(0.0)) return false;
    return true;
  }
};

/// μ̃ = diag((1 − i s μ_•/(2μ^•)) μ, (λ/|λ|)(μ^• − i s μ_•/2)) with s = sign(Im λ).
template <int Dim>
LiftedCoefficient<Dim> lift_coefficient(const fem::CoefficientField<Dim>& mu, Complex lambda, unsigned seed = 1,
                                        int samples = 64) {
  require(lambda != Complex(0.0), "lift_coefficient: λ = 0 has no direction λ/|λ|");
  require(lambda.real() >= 0.0, "lift_coefficient: Re λ must be nonnegative");
  const double lo = mu.ellipticity(), hi = mu.bound();
  require(lo > 0.0, "lift_coefficient: μ is not elliptic");
  const double s = (lambda.imag() > 0.0) - (lambda.imag() < 0.0);
  const Complex top = Complex(1.0, -s * lo / (2.0 * hi));
  const Complex corner = lambda / std::abs(lambda) * Complex(hi, -s * lo / 2.0);

  LiftedCoefficient<Dim> out;
  out.lambda = lambda;
  out.kappa_tilde = std::numeric_limits<double>::infinity();
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  using Matrix = typename LiftedCoefficient<Dim>::Matrix;
  for (std::size_t c = 0; c < mu.size(); ++c) {
    Matrix m = Matrix::Zero();
    m.template topLeftCorner<Dim, Dim>() = top * mu[c];
    m(Dim, Dim) = corner;
    out.cells.push_back(m);
    const Matrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    double k = es.eigenvalues()(0);
    // sampled directions confirm the analytic minimum from above
    for (int t = 0; t < samples; ++t) {
      Eigen::Matrix<Complex, Dim + 1, 1> xi;
      for (int i = 0; i <= Dim; ++i) xi(i) = Complex(g(rng), g(rng));
      xi.normalize();
      k = std::min(k, std::real(xi.dot(m * xi)));
    }
    out.kappa_tilde = std::min(out.kappa_tilde, k);
    Eigen::JacobiSVD<Matrix> svd(m);
    out.bound_tilde = std::max(out.bound_tilde, svd.singularValues()(0));
  }
  return out;
}

/// 40 points of ℂ₊: moduli {0.1, …, 1000} times eight arguments in ]−π/2, π/2[.
inline std::vector<Complex> lift_grid() {
  const double half = 2.0 * std::atan(1.0);
  std::vector<Complex> out;
  for (double r : {0.1, 1.0, 10.0, 100.0, 1000.0})
    for (int k = 0; k < 8; ++k) out.push_back(std::polar(r, half * (-0.875 + 0.25 * k)));
  return out;
}

}  // namespace mixedreg::lab
