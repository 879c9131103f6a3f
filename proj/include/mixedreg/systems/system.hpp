#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/fem/dofs.hpp"
#include "mixedreg/fem/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace mixedreg::systems {

/// Per-cell coefficient 𝔸 acting on z = (u, ∇u) ∈ R^m × R^{m×d}, stored as one
/// (m + m d)² matrix. Index i is u_i; m + i d + k is ∂_k u_i. Row = test side.
struct SystemCoefficient {
  int m = 0;
  int d = 0;
  std::vector<Eigen::MatrixXd> cells;

  int width() const { return m + m * d; }

  Eigen::MatrixXd a11(std::size_t c) const { return cells[c].topLeftCorner(m, m); }
  Eigen::MatrixXd a12(std::size_t c) const { return cells[c].topRightCorner(m, m * d); }
  Eigen::MatrixXd a21(std::size_t c) const { return cells[c].bottomLeftCorner(m * d, m); }
  Eigen::MatrixXd a22(std::size_t c) const { return cells[c].bottomRightCorner(m * d, m * d); }

  void validate(std::size_t num_cells) const {
    require(m >= 1 && (d == 2 || d == 3), "SystemCoefficient: need m ≥ 1 and d ∈ {2, 3}");
    require(cells.size() == num_cells, "SystemCoefficient: one block matrix per cell expected");
    for (const auto& a : cells) {
      require(a.rows() == width() && a.cols() == width(), "SystemCoefficient: block dimensions inconsistent");
      require(a.allFinite(), "SystemCoefficient: non-finite entry");
    }
  }

  /// Fills every cell from a bilinear form on z vectors: 𝔸(p, q) = b(e_q, e_p).
  static SystemCoefficient from_bilinear(int m, int d, std::size_t num_cells,
                                         const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& b) {
    SystemCoefficient s{m, d, {}};
    const int w = s.width();
    Eigen::MatrixXd a(w, w);
    for (int p = 0; p < w; ++p)
      for (int q = 0; q < w; ++q) a(p, q) = b(Eigen::VectorXd::Unit(w, q), Eigen::VectorXd::Unit(w, p));
    s.cells.assign(num_cells, a);
    return s;
  }
};

/// Exact P1 local matrix of ∫ 𝔸(z_u) · z_v for cellwise constant 𝔸.
template <int Dim>
DenseMatrix<double> local_system(const fem::Mesh<Dim>& mesh, std::size_t c, const Eigen::MatrixXd& a, int m) {
  const auto g = mesh.gradients(c);
  const double vol = mesh.volume(c);
  const double mean = vol / (Dim + 1);  // ∫ φ_a
  const auto mass = fem::local_mass<double>(mesh, c);
  const int n = (Dim + 1) * m;
  DenseMatrix<double> out = DenseMatrix<double>::Zero(n, n);
  for (int va = 0; va <= Dim; ++va)
    for (int i = 0; i < m; ++i)
      for (int vb = 0; vb <= Dim; ++vb)
        for (int j = 0; j < m; ++j) {
          double s = a(i, j) * mass(va, vb);
          for (int k = 0; k < Dim; ++k) {
            s += a(i, m + j * Dim + k) * g(vb, k) * mean;
            s += a(m + i * Dim + k, j) * g(va, k) * mean;
            for (int l = 0; l < Dim; ++l) s += a(m + i * Dim + k, m + j * Dim + l) * g(va, k) * g(vb, l) * vol;
          }
          out(va * m + i, vb * m + j) = s;
        }
  return out;
}

/// Vector P1 realization of 𝔸 with one Dirichlet selector per component.
template <int Dim>
fem::DiscreteOperator<double> assemble_system(const fem::Mesh<Dim>& mesh, const SystemCoefficient& coeff,
                                              const std::vector<fem::FacetSelector>& dirichlet,
                                              const fem::AssemblyOptions& opt = {}) {
  coeff.validate(mesh.num_cells());
  require(coeff.d == Dim, "assemble_system: coefficient dimension differs from the mesh");
  require(static_cast<int>(dirichlet.size()) == coeff.m, "assemble_system: one Dirichlet selector per component");
  fem::DiscreteOperator<double> op;
  op.dofs = fem::DofMap(mesh, dirichlet);
  auto [g, mass] = fem::assemble_gram<double>(mesh, op.dofs, opt);
  op.G = std::move(g);
  op.mass = std::move(mass);
  op.A = fem::assemble_cells<double>(
      mesh, op.dofs, [&](std::size_t c) { return local_system(mesh, c, coeff.cells[c], coeff.m); }, opt);
  return op;
}

}  // namespace mixedreg::systems
