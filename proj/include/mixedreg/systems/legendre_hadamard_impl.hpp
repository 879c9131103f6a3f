#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>
#include <boost/random/sobol.hpp>

#include <algorithm>
#include <limits>
#include <vector>

namespace mixedreg::systems {

namespace detail {

// B(η)_{ij} = Σ_{kl} A[(i,k),(j,l)] conj(η_k) η_l, Hermitian part.
inline Eigen::MatrixXcd lh_fix_eta(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& eta, int m, int d) {
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) b(i, j) += a(i * d + k, j * d + l) * std::conj(eta(k)) * eta(l);
  return 0.5 * (b + b.adjoint());
}

inline Eigen::MatrixXcd lh_fix_xi(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& xi, int m, int d) {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) c(k, l) += a(i * d + k, j * d + l) * std::conj(xi(i)) * xi(j);
  return 0.5 * (c + c.adjoint());
}

inline double lh_cell(const Eigen::MatrixXcd& a, int m, int d, int samples) {
  const int dim = 2 * (m + d);
  boost::random::sobol qrng(dim);
  const boost::math::normal_distribution<double> normal;
  const double span = static_cast<double>(qrng.max() - qrng.min()) + 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    std::vector<double> z(dim);
    for (auto& v : z) {
      const double t = (static_cast<double>(qrng() - qrng.min()) + 0.5) / span;
      v = boost::math::quantile(normal, std::clamp(t, 1e-12, 1.0 - 1e-12));
    }
    Eigen::VectorXcd xi(m), eta(d);
    for (int i = 0; i < m; ++i) xi(i) = Complex(z[2 * i], z[2 * i + 1]);
    for (int k = 0; k < d; ++k) eta(k) = Complex(z[2 * m + 2 * k], z[2 * m + 2 * k + 1]);
    if (xi.norm() == 0.0 || eta.norm() == 0.0) continue;
    xi.normalize();
    eta.normalize();
    double val = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 50; ++it) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ex(lh_fix_eta(a, eta, m, d));
      xi = ex.eigenvectors().col(0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ee(lh_fix_xi(a, xi, m, d));
      eta = ee.eigenvectors().col(0);
      const double next = ee.eigenvalues()(0);
      const bool done = std::abs(val - next) <= 1e-14 * std::max(1.0, std::abs(next));
      val = next;
      if (done) break;
    }
    best = std::min(best, val);
  }
  return best;
}

}  // namespace detail

inline double legendre_hadamard(const std::vector<Eigen::MatrixXcd>& a22, int m, int d, int sample_count) {
  require(sample_count >= 100, "legendre_hadamard: at least 100 samples required");
  require(m >= 1 && d >= 1 && !a22.empty(), "legendre_hadamard: empty coefficient");
  double best = std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd* last = nullptr;
  for (const auto& a : a22) {
    require(a.rows() == m * d && a.cols() == m * d, "legendre_hadamard: block must be (m d) × (m d)");
    if (last && a == *last) continue;
    best = std::min(best, detail::lh_cell(a, m, d, sample_count));
    last = &a;
  }
  return best;
}

}  // namespace mixedreg::systems
