#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/fem/mesh.hpp"

#include <cmath>

namespace mixedreg::lab {

struct InterpolationCheck {
  double p = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// ‖u‖_{1,p} ≤ ‖u‖_{1,p0}^{1−θ} ‖u‖_{1,p1}^θ with 1/p = (1−θ)/p0 + θ/p1.
template <class S, int Dim>
InterpolationCheck interpolation_check(const fem::Mesh<Dim>& mesh, const Vector<S>& u, double p0, double p1,
                                       double theta) {
  require(p0 >= 1.0 && p1 > p0 && std::isfinite(p1), "interpolation_check: need 1 ≤ p0 < p1 < ∞");
  require(theta > 0.0 && theta < 1.0, "interpolation_check: θ must lie in ]0, 1[");
  InterpolationCheck r;
  r.p = 1.0 / ((1.0 - theta) / p0 + theta / p1);
  r.lhs = fem::w1p_norm(mesh, u, r.p);
  r.rhs = std::pow(fem::w1p_norm(mesh, u, p0), 1.0 - theta) * std::pow(fem::w1p_norm(mesh, u, p1), theta);
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

}  // namespace mixedreg::lab
