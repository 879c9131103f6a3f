#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/coefficient.hpp"
#include "mixedreg/fem/dofs.hpp"
#include "mixedreg/fem/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

namespace mixedreg::fem {

/// Sparse realization of a sesquilinear form on the free dofs together with
/// the W^{1,2} Gram matrix G and the mass matrix on the same space.
/// A(i, j) = a(φ_j, φ_i), so that A u = f solves a(u, v) = ⟨f, v⟩.
template <class S>
struct DiscreteOperator {
  SparseMatrix<S> A;
  SparseMatrix<S> G;
  SparseMatrix<S> mass;
  DofMap dofs;

  std::size_t size() const { return dofs.num_free(); }
};

struct AssemblyOptions {
  /// Worker threads for the cell loop. The merge order is fixed, so a given
  /// thread count always yields the same matrix.
  int threads = 1;
};

namespace detail {

// Barycentric quadrature points of degree 2 (edge midpoints in 2D, the
// symmetric 4-point rule in 3D), equal weights.
template <int Dim>
std::vector<Eigen::Matrix<double, Dim + 1, 1>> degree2_points() {
  std::vector<Eigen::Matrix<double, Dim + 1, 1>> pts;
  if constexpr (Dim == 2) {
    pts.emplace_back(0.5, 0.5, 0.0);
    pts.emplace_back(0.0, 0.5, 0.5);
    pts.emplace_back(0.5, 0.0, 0.5);
  } else {
    const double a = 0.5854101966249685, b = 0.1381966011250105;
    for (int k = 0; k < 4; ++k) {
      Eigen::Vector4d p = Eigen::Vector4d::Constant(b);
      p(k) = a;
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace detail

/// Assembles Σ_cells local matrices into free-dof sparse form. local(c)
/// returns a ((Dim+1)m)² matrix in local ordering (vertex a, component k) ↦ a·m + k.
template <class S, int Dim, class Local>
SparseMatrix<S> assemble_cells(const Mesh<Dim>& mesh, const DofMap& dofs, Local&& local, const AssemblyOptions& opt = {}) {
  const int m = dofs.components();
  const int threads = std::max(1, opt.threads);
  std::vector<std::vector<Eigen::Triplet<S>>> parts(threads);
  auto work = [&](int t) {
    const std::size_t n = mesh.num_cells();
    const std::size_t begin = n * t / threads, end = n * (t + 1) / threads;
    auto& out = parts[t];
    for (std::size_t c = begin; c < end; ++c) {
      const DenseMatrix<S> loc = local(c);
      for (int a = 0; a <= Dim; ++a)
        for (int ka = 0; ka < m; ++ka) {
          const int i = dofs.free_index(mesh.cells[c][a], ka);
          if (i < 0) continue;
          for (int b = 0; b <= Dim; ++b)
            for (int kb = 0; kb < m; ++kb) {
              const int j = dofs.free_index(mesh.cells[c][b], kb);
              if (j < 0) continue;
              out.emplace_back(i, j, loc(a * m + ka, b * m + kb));
            }
        }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::vector<Eigen::Triplet<S>> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  const auto n = static_cast<Eigen::Index>(dofs.num_free());
  SparseMatrix<S> A(n, n);
  A.setFromTriplets(all.begin(), all.end());
  A.makeCompressed();
  return A;
}

/// Local P1 stiffness with a Dim×Dim coefficient: K(a,b) = |T| μ∇λ_b·∇λ_a.
template <class S, int Dim, class M>
DenseMatrix<S> local_stiffness(const Mesh<Dim>& mesh, std::size_t c, const M& mu) {
  const auto g = mesh.gradients(c);
  const double vol = mesh.volume(c);
  DenseMatrix<S> k(Dim + 1, Dim + 1);
  for (int a = 0; a <= Dim; ++a)
    for (int b = 0; b <= Dim; ++b) {
      S v{};
      for (int r = 0; r < Dim; ++r)
        for (int s = 0; s < Dim; ++s) {
          if constexpr (is_complex_v<S>) v += g(a, r) * S(mu(r, s)) * g(b, s);
          else v += g(a, r) * std::real(mu(r, s)) * g(b, s);
        }
      k(a, b) = vol * v;
    }
  return k;
}

/// Consistent P1 mass matrix of a cell.
template <class S, int Dim>
DenseMatrix<S> local_mass(const Mesh<Dim>& mesh, std::size_t c) {
  const double vol = mesh.volume(c);
  const double denom = (Dim == 2) ? 12.0 : 20.0;
  DenseMatrix<S> mloc(Dim + 1, Dim + 1);
  for (int a = 0; a <= Dim; ++a)
    for (int b = 0; b <= Dim; ++b) mloc(a, b) = S(vol * (a == b ? 2.0 : 1.0) / denom);
  return mloc;
}

/// Componentwise copy of a scalar local matrix into an m-component block.
template <class S>
DenseMatrix<S> blockwise(const DenseMatrix<S>& scalar, int m) {
  const auto n = scalar.rows();
  DenseMatrix<S> out = DenseMatrix<S>::Zero(n * m, n * m);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (int k = 0; k < m; ++k) out(a * m + k, b * m + k) = scalar(a, b);
  return out;
}

/// Vector W^{1,2} Gram matrix (∫ ∇u:∇v̄ + u·v̄) and mass matrix on dofs.
template <class S, int Dim>
std::pair<SparseMatrix<S>, SparseMatrix<S>> assemble_gram(const Mesh<Dim>& mesh, const DofMap& dofs,
                                                          const AssemblyOptions& opt = {}) {
  const int m = dofs.components();
  const Eigen::Matrix<double, Dim, Dim> id = Eigen::Matrix<double, Dim, Dim>::Identity();
  auto mass = assemble_cells<S>(mesh, dofs, [&](std::size_t c) { return blockwise<S>(local_mass<S>(mesh, c), m); }, opt);
  auto stiff = assemble_cells<S>(
      mesh, dofs, [&](std::size_t c) { return blockwise<S>(local_stiffness<S>(mesh, c, id), m); }, opt);
  SparseMatrix<S> g = stiff + mass;
  g.makeCompressed();
  return {std::move(g), std::move(mass)};
}

/// Realization of −∇·μ∇ + shift on the free dofs of P1 with the Dirichlet
/// set chosen by `dirichlet` (default: facets tagged in the scene).
template <int Dim>
DiscreteOperator<Complex> assemble(const Mesh<Dim>& mesh, const CoefficientField<Dim>& mu, double shift,
                                   const FacetSelector& dirichlet = select::tagged(0), const AssemblyOptions& opt = {}) {
  require(mu.size() == mesh.num_cells(), "assemble: coefficient and mesh cell counts differ");
  require(shift >= 0.0, "assemble: shift must be nonnegative");
  require(mu.ellipticity() > 0.0, "assemble: coefficient is not elliptic (μ_• ≤ 0)");
  DiscreteOperator<Complex> op;
  op.dofs = DofMap(mesh, {dirichlet});
  auto [g, mass] = assemble_gram<Complex>(mesh, op.dofs, opt);
  op.G = std::move(g);
  op.mass = std::move(mass);
  SparseMatrix<Complex> k = assemble_cells<Complex>(
      mesh, op.dofs, [&](std::size_t c) { return local_stiffness<Complex>(mesh, c, mu[c]); }, opt);
  op.A = k + Complex(shift) * op.mass;
  op.A.makeCompressed();
  return op;
}

/// ⟨f, v⟩ = ∫_Ω f_Ω v̄ + ∫_Γ f_Γ v̄ on the free dofs of a scalar operator.
/// Either density may be empty. f_Γ must vanish on Dirichlet facets.
template <class S, int Dim>
Vector<S> assemble_load(const Mesh<Dim>& mesh, const DofMap& dofs,
                        const std::function<S(const typename Mesh<Dim>::Point&)>& f_domain,
                        const std::function<S(const typename Mesh<Dim>::Point&, const BoundaryFacet&)>& f_gamma = {}) {
  require(dofs.components() == 1, "assemble_load: scalar dof map expected");
  Vector<S> full = Vector<S>::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  if (f_domain) {
    const auto pts = detail::degree2_points<Dim>();
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const double w = mesh.volume(c) / static_cast<double>(pts.size());
      for (const auto& lam : pts) {
        typename Mesh<Dim>::Point x = Mesh<Dim>::Point::Zero();
        for (int a = 0; a <= Dim; ++a) x += lam(a) * mesh.vertices[mesh.cells[c][a]];
        const S fx = f_domain(x);
        for (int a = 0; a <= Dim; ++a) full(mesh.cells[c][a]) += w * lam(a) * fx;
      }
    }
  }
  if (f_gamma) {
    for (const auto& f : mesh.boundary) {
      // Gauss points on the facet: two on an edge, three on a triangle
      std::vector<Eigen::VectorXd> lam;
      double measure;
      if constexpr (Dim == 2) {
        const double g = 0.5 / std::sqrt(3.0);
        lam = {Eigen::Vector2d(0.5 + g, 0.5 - g), Eigen::Vector2d(0.5 - g, 0.5 + g)};
        measure = (mesh.vertices[f.vertices[1]] - mesh.vertices[f.vertices[0]]).norm();
      } else {
        lam = {Eigen::Vector3d(2. / 3, 1. / 6, 1. / 6), Eigen::Vector3d(1. / 6, 2. / 3, 1. / 6),
               Eigen::Vector3d(1. / 6, 1. / 6, 2. / 3)};
        measure = 0.5 * (mesh.vertices[f.vertices[1]] - mesh.vertices[f.vertices[0]])
                            .cross(mesh.vertices[f.vertices[2]] - mesh.vertices[f.vertices[0]])
                            .norm();
      }
      const double w = measure / static_cast<double>(lam.size());
      for (const auto& l : lam) {
        typename Mesh<Dim>::Point x = Mesh<Dim>::Point::Zero();
        for (int a = 0; a < Dim; ++a) x += l(a) * mesh.vertices[f.vertices[a]];
        const S gx = f_gamma(x, f);
        if (gx == S{}) continue;
        bool on_dirichlet = true;
        for (int v : f.vertices) on_dirichlet = on_dirichlet && dofs.constrained(v, 0);
        if (f.dirichlet != 0u || on_dirichlet)
          throw InvalidInput("assemble_load: boundary density is nonzero on a Dirichlet facet");
        for (int a = 0; a < Dim; ++a) full(f.vertices[a]) += w * l(a) * gx;
      }
    }
  }
  return dofs.restrict_free(full);
}

/// ( Σ_cells ∫ (|u|² + |∇u|²)^{p/2} )^{1/p} for a full vertex vector u. |u|
/// uses the positive-weight degree-2 rule and ∇u is constant per cell, so
/// the result is an exact L^p norm of the pair (u, ∇u) under a fixed
/// discrete measure; at p = 2 it equals sqrt(u^H G u).
template <class S, int Dim>
double w1p_norm(const Mesh<Dim>& mesh, const Vector<S>& u, double p) {
  require(p >= 1.0 && std::isfinite(p), "w1p_norm: exponent must lie in [1, ∞[");
  require(static_cast<std::size_t>(u.size()) == mesh.num_vertices(), "w1p_norm: one value per vertex expected");
  const auto pts = detail::degree2_points<Dim>();
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto g = mesh.gradients(c);
    Eigen::Matrix<S, Dim, 1> grad = Eigen::Matrix<S, Dim, 1>::Zero();
    for (int a = 0; a <= Dim; ++a) grad += u(mesh.cells[c][a]) * g.row(a).transpose().template cast<S>();
    const double grad2 = grad.squaredNorm();
    const double w = mesh.volume(c) / static_cast<double>(pts.size());
    for (const auto& lam : pts) {
      S val{};
      for (int a = 0; a <= Dim; ++a) val += lam(a) * u(mesh.cells[c][a]);
      const double q = std::norm(val) + grad2;
      sum += w * (p == 2.0 ? q : std::pow(q, 0.5 * p));
    }
  }
  return std::pow(sum, 1.0 / p);
}

}  // namespace mixedreg::fem
