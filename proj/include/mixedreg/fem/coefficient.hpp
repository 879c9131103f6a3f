#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace mixedreg::fem {

/// Per-cell coefficient matrix μ (Dim×Dim, complex entries allowed).
template <int Dim>
class CoefficientField {
 public:
  using Matrix = Eigen::Matrix<Complex, Dim, Dim>;

  CoefficientField() = default;
  CoefficientField(std::vector<Matrix> per_cell, std::string id = "custom") : mu_(std::move(per_cell)), id_(std::move(id)) {
    for (const auto& m : mu_) require(m.allFinite(), "CoefficientField: non-finite entry");
  }

  const Matrix& operator[](std::size_t c) const { return mu_[c]; }
  std::size_t size() const { return mu_.size(); }
  const std::string& id() const { return id_; }
  const std::vector<Matrix>& cells() const { return mu_; }

  /// μ_• = min over cells of the smallest eigenvalue of (μ + μ^H)/2.
  double ellipticity() const {
    double e = std::numeric_limits<double>::infinity();
    for (const auto& m : mu_) {
      const Matrix h = 0.5 * (m + m.adjoint());
      Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
      e = std::min(e, es.eigenvalues().minCoeff());
    }
    return e;
  }

  /// μ^• = max over cells of the operator (spectral) norm.
  double bound() const {
    double b = 0.0;
    for (const auto& m : mu_) {
      Eigen::JacobiSVD<Matrix> svd(m);
      b = std::max(b, svd.singularValues()(0));
    }
    return b;
  }

  bool hermitian(double tol = 1e-14) const {
    for (const auto& m : mu_)
      if ((m - m.adjoint()).norm() > tol * std::max(1.0, m.norm())) return false;
    return true;
  }

  bool real() const {
    for (const auto& m : mu_)
      if (m.imag().norm() != 0.0) return false;
    return true;
  }

 private:
  std::vector<Matrix> mu_;
  std::string id_ = "custom";
};

namespace coefficients {

template <int Dim>
CoefficientField<Dim> constant(const Mesh<Dim>& mesh, const Eigen::Matrix<Complex, Dim, Dim>& m, std::string id = "constant") {
  return CoefficientField<Dim>(std::vector<Eigen::Matrix<Complex, Dim, Dim>>(mesh.num_cells(), m), std::move(id));
}

template <int Dim>
CoefficientField<Dim> scalar(const Mesh<Dim>& mesh, Complex value) {
  return constant<Dim>(mesh, value * Eigen::Matrix<Complex, Dim, Dim>::Identity(), "scalar");
}

template <int Dim>
CoefficientField<Dim> identity(const Mesh<Dim>& mesh) {
  return constant<Dim>(mesh, Eigen::Matrix<Complex, Dim, Dim>::Identity(), "identity");
}

/// Scalar coefficient from a function of the cell centroid.
template <int Dim>
CoefficientField<Dim> from_function(const Mesh<Dim>& mesh,
                                    const std::function<Eigen::Matrix<Complex, Dim, Dim>(const typename Mesh<Dim>::Point&)>& f,
                                    std::string id = "function") {
  std::vector<Eigen::Matrix<Complex, Dim, Dim>> mu;
  mu.reserve(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) mu.push_back(f(mesh.centroid(c)));
  return CoefficientField<Dim>(std::move(mu), std::move(id));
}

/// μ = contrast·I on the tiles with (i + j) odd of a tiles×tiles pattern over
/// [lo, hi], μ = I elsewhere. Tile corners are cross points of the pattern.
inline CoefficientField<2> checkerboard(const Mesh<2>& mesh, double contrast, int tiles = 2, Point2 lo = Point2(0, 0),
                                        Point2 hi = Point2(1, 1)) {
  require(contrast > 0.0, "checkerboard: contrast must be positive");
  require(tiles >= 1, "checkerboard: need at least one tile");
  return from_function<2>(
      mesh,
      [&](const Point2& x) -> Eigen::Matrix2cd {
        const Point2 t = (x - lo).cwiseQuotient(hi - lo) * tiles;
        const int i = static_cast<int>(std::floor(t.x())), j = static_cast<int>(std::floor(t.y()));
        const double v = ((i + j) % 2 != 0) ? contrast : 1.0;
        return v * Eigen::Matrix2cd::Identity();
      },
      "checkerboard" + std::to_string(static_cast<long long>(contrast)));
}

}  // namespace coefficients

}  // namespace mixedreg::fem
