#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/solvers/spectral.hpp"
#include "mixedreg/systems/system.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <vector>

namespace mixedreg::systems {

/// Isotropic elasticity tensor C F = 2μ F + λ tr(F) I on symmetric matrices.
struct ElasticityTensor {
  double lame_lambda = 1.0;
  double lame_mu = 1.0;

  void validate(int d) const {
    require(std::isfinite(lame_lambda) && std::isfinite(lame_mu), "ElasticityTensor: non-finite modulus");
    if (!(lame_mu > 0.0)) throw InvalidInput("ElasticityTensor: μ ≤ 0");
    if (!(2.0 * lame_mu + d * lame_lambda > 0.0))
      throw InvalidInput("ElasticityTensor: 2μ + " + std::to_string(d) + "λ ≤ 0");
  }

  template <class M>
  M apply(const M& f) const {
    return 2.0 * lame_mu * f + lame_lambda * f.trace() * M::Identity(f.rows(), f.cols());
  }

  /// c_κ with C F : F ≥ c_κ |F|² on symmetric F.
  double coercivity(int d) const { return std::min(2.0 * lame_mu, 2.0 * lame_mu + d * lame_lambda); }
};

namespace detail {

inline Eigen::MatrixXd gradient_of(const Eigen::VectorXd& z, int offset, int rows, int d) {
  Eigen::MatrixXd g(rows, d);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < d; ++k) g(i, k) = z(offset + i * d + k);
  return g;
}

}  // namespace detail

/// 𝔸 for ∫ C e(u) : e(v), m = d.
inline SystemCoefficient elasticity_coefficient(const ElasticityTensor& c, int d, std::size_t num_cells) {
  c.validate(d);
  return SystemCoefficient::from_bilinear(d, d, num_cells, [&](const Eigen::VectorXd& zu, const Eigen::VectorXd& zv) {
    const Eigen::MatrixXd gu = detail::gradient_of(zu, d, d, d), gv = detail::gradient_of(zv, d, d, d);
    const Eigen::MatrixXd eu = 0.5 * (gu + gu.transpose()), ev = 0.5 * (gv + gv.transpose());
    return c.apply(eu).cwiseProduct(ev).sum();
  });
}

inline std::vector<fem::FacetSelector> same_mask(const fem::FacetSelector& s, int m) {
  return std::vector<fem::FacetSelector>(m, s);
}

template <int Dim>
fem::DiscreteOperator<double> assemble_elasticity(const fem::Mesh<Dim>& mesh, const ElasticityTensor& c,
                                                  const std::vector<fem::FacetSelector>& dirichlet,
                                                  const fem::AssemblyOptions& opt = {}) {
  return assemble_system(mesh, elasticity_coefficient(c, Dim, mesh.num_cells()), dirichlet, opt);
}

/// Minimum of Re(A₂₂ ξ⊗η : conj(ξ⊗η)) over unit ξ ∈ C^m, η ∈ C^d: Sobol
/// starts followed by alternating exact minimization in ξ and η.
inline double legendre_hadamard(const std::vector<Eigen::MatrixXcd>& a22, int m, int d, int sample_count = 256);

inline double legendre_hadamard(const SystemCoefficient& s, int sample_count = 256) {
  std::vector<Eigen::MatrixXcd> blocks;
  for (std::size_t c = 0; c < s.cells.size(); ++c) blocks.push_back(s.a22(c).cast<Complex>());
  return legendre_hadamard(blocks, s.m, s.d, sample_count);
}

struct KornConstants {
  /// min generalized eigenvalue of (mass + e:e form, G)
  double korn2 = 0.0;
  /// min generalized eigenvalue of (e:e form, G) on the constrained space
  double korn1 = 0.0;
  bool has_korn1 = false;
};

/// Korn constants of a mesh for a per-component Dirichlet mask. korn1 is
/// only defined when some component is constrained.
template <int Dim>
KornConstants korn_constants(const fem::Mesh<Dim>& mesh, const std::vector<fem::FacetSelector>& dirichlet,
                             bool want_korn1 = true) {
  require(static_cast<int>(dirichlet.size()) == Dim, "korn_constants: one selector per component");
  // e(u):e(v) is C with μ = 1/2, λ = 0
  auto op = assemble_elasticity(mesh, ElasticityTensor{0.0, 0.5}, dirichlet);
  KornConstants k;
  fem::DiscreteOperator<double> k2 = op;
  k2.A = op.A + op.mass;
  k.korn2 = solvers::estimate_coercivity(k2).kappa_hat;
  if (want_korn1) {
    bool any = false;
    for (int c = 0; c < Dim; ++c) any = any || op.dofs.num_constrained(c) > 0;
    if (!any) throw InvalidInput("korn_constants: empty Dirichlet set, rigid motions defeat Korn's first inequality");
    k.korn1 = solvers::estimate_coercivity(op).kappa_hat;
    k.has_korn1 = true;
  }
  return k;
}

}  // namespace mixedreg::systems

#include "mixedreg/systems/legendre_hadamard_impl.hpp"
