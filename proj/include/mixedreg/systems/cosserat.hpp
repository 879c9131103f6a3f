#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/systems/elasticity.hpp"
#include "mixedreg/systems/system.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace mixedreg::systems {

struct CosseratParams {
  double mu = 1.0;
  double lambda = 1.0;
  double mu_c = 0.0;
  double gamma = 1.0;

  /// Empty when valid, otherwise the first violated inequality.
  std::string violation() const {
    if (!(mu > 0.0)) return "μ ≤ 0";
    if (!(2.0 * mu + 3.0 * lambda > 0.0)) return "2μ+3λ ≤ 0";
    if (!(mu_c >= 0.0)) return "μ_c < 0";
    if (!(gamma > 0.0)) return "γ ≤ 0";
    return {};
  }
  bool valid() const { return violation().empty(); }
  void validate() const {
    const auto v = violation();
    if (!v.empty()) throw InvalidInput("CosseratParams: " + v);
  }
};

/// Skew matrix with upper entries (r₁, r₂, r₃) row by row.
inline Eigen::Matrix3d skew_from_entries(double r1, double r2, double r3) {
  Eigen::Matrix3d r;
  r << 0, r1, r2, -r1, 0, r3, -r2, -r3, 0;
  return r;
}

/// axl R = (−r₃, r₂, −r₁), so R x = axl R × x.
inline Eigen::Vector3d axl(const Eigen::Matrix3d& r) { return {-r(1, 2), r(0, 2), -r(0, 1)}; }

inline Eigen::Matrix3d skew_from_axl(const Eigen::Vector3d& a) {
  Eigen::Matrix3d r;
  r << 0, -a(2), a(1), a(2), 0, -a(0), -a(1), a(0), 0;
  return r;
}

/// 𝔸 on z = (u, a, ∇u, ∇a) with a = axl R, m = 6, d = 3.
inline SystemCoefficient cosserat_coefficient(const CosseratParams& p, std::size_t num_cells) {
  p.validate();
  constexpr int m = 6, d = 3;
  return SystemCoefficient::from_bilinear(m, d, num_cells, [&](const Eigen::VectorXd& zu, const Eigen::VectorXd& zv) {
    auto parts = [](const Eigen::VectorXd& z) {
      const Eigen::Matrix3d gu = detail::gradient_of(z, m, 3, d);
      const Eigen::Matrix3d ga = detail::gradient_of(z.tail(3 * d), 0, 3, d);
      return std::tuple{Eigen::Vector3d(z.segment<3>(3)), gu, ga};
    };
    const auto [au, gu, gau] = parts(zu);
    const auto [av, gv, gav] = parts(zv);
    const Eigen::Matrix3d eu = 0.5 * (gu + gu.transpose()), ev = 0.5 * (gv + gv.transpose());
    const Eigen::Matrix3d wu = gu - skew_from_axl(au), wv = gv - skew_from_axl(av);
    const Eigen::Matrix3d su = 0.5 * (wu - wu.transpose()), sv = 0.5 * (wv - wv.transpose());
    return 2.0 * p.mu * eu.cwiseProduct(ev).sum() + p.lambda * gu.trace() * gv.trace() +
           2.0 * p.mu_c * su.cwiseProduct(sv).sum() + p.gamma * gau.cwiseProduct(gav).sum();
  });
}

/// Cosserat operator; displacement mask for components 0..2, rotation mask for 3..5.
inline fem::DiscreteOperator<double> assemble_cosserat(const fem::Mesh3& mesh, const CosseratParams& p,
                                                       const fem::FacetSelector& u_mask,
                                                       const fem::FacetSelector& r_mask,
                                                       const fem::AssemblyOptions& opt = {}) {
  std::vector<fem::FacetSelector> masks(3, u_mask);
  masks.insert(masks.end(), 3, r_mask);
  return assemble_system(mesh, cosserat_coefficient(p, mesh.num_cells()), masks, opt);
}

}  // namespace mixedreg::systems
