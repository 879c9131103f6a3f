#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/fem/coefficient.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/fem/mesher.hpp"
#include "mixedreg/geometry/scene.hpp"
#include "mixedreg/lab/sweep.hpp"
#include "mixedreg/solvers/direct.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace mixedreg::lab {

using PointCoefficient = std::function<Eigen::Matrix2cd(const Point2&)>;

struct MeyersOptions {
  std::vector<double> p_grid{2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0};
  double h0 = 0.1;
  /// number of meshes: the initial one plus levels − 1 uniform refinements
  int levels = 3;
  double threshold = 1.1;
  /// coefficient jump lines that must be resolved by mesh edges
  std::vector<geometry::Segment> interfaces;
  /// right-hand side f of (−∇·μ∇ + 1)u = f
  std::function<Complex(const Point2&)> rhs = [](const Point2&) { return Complex(1.0); };
  /// Neumann data ν·μ∇u on the non-Dirichlet boundary
  std::function<Complex(const Point2&, const fem::BoundaryFacet&)> flux;
  std::string coefficient_id = "custom";
};

struct MeyersResult {
  /// axis p; columns norm_L<k> per level and growth = finest/second-finest ratio
  SweepResult table;
  /// largest grid p up to which every growth ratio stays below the threshold;
  /// 1 when the smallest p already grows
  double p_crit = 1.0;
  std::vector<double> mesh_sizes;
};

/// Refinement study of ‖u_h‖_{W^{1,p}} for (−∇·μ∇ + 1)u = f with the scene's
/// Dirichlet part; growth between the two finest levels flags p outside I.
inline MeyersResult meyers_sweep(const geometry::PlanarScene& scene, const PointCoefficient& mu,
                                 const MeyersOptions& opt = {}) {
  require(opt.levels >= 2, "meyers_sweep: at least two refinement levels required");
  require(!opt.p_grid.empty(), "meyers_sweep: empty exponent grid");
  for (double p : opt.p_grid) require(p > 1.0 && std::isfinite(p), "meyers_sweep: exponents must lie in ]1, ∞[");
  require(opt.threshold > 1.0, "meyers_sweep: growth threshold must exceed 1");

  MeyersResult res;
  auto& t = res.table;
  t.axis_name = "p";
  t.axis = opt.p_grid;
  t.values.assign(opt.p_grid.size(), {});
  fem::Mesh2 mesh = fem::build_mesh(scene, opt.h0, opt.interfaces);
  double h = opt.h0;
  for (int level = 0; level < opt.levels; ++level) {
    if (level > 0) {
      mesh = fem::uniform_refine(mesh);
      h *= 0.5;
    }
    res.mesh_sizes.push_back(h);
    const auto coeff = fem::coefficients::from_function<2>(mesh, mu, opt.coefficient_id);
    const auto op = fem::assemble(mesh, coeff, 1.0);
    const auto f = fem::assemble_load<Complex, 2>(mesh, op.dofs, opt.rhs, opt.flux);
    const auto u = op.dofs.expand(solvers::solve_direct(op.A, f));
    t.columns.push_back("norm_L" + std::to_string(level));
    for (std::size_t i = 0; i < opt.p_grid.size(); ++i) t.values[i].push_back(fem::w1p_norm(mesh, u, opt.p_grid[i]));
  }
  t.columns.push_back("growth");
  bool ok = true;
  for (std::size_t i = 0; i < opt.p_grid.size(); ++i) {
    const auto& row = t.values[i];
    const double growth = row[row.size() - 1] / row[row.size() - 2];
    t.values[i].push_back(growth);
    ok = ok && growth < opt.threshold;
    if (ok) res.p_crit = opt.p_grid[i];
  }
  t.metadata = {{"scene", scene.name()},
                {"coefficient", opt.coefficient_id},
                {"levels", std::to_string(opt.levels)},
                {"h0", std::to_string(opt.h0)},
                {"threshold", std::to_string(opt.threshold)},
                {"p_crit", std::to_string(res.p_crit)}};
  t.validate();
  return res;
}

/// μ = contrast on the odd tiles of a tiles×tiles checkerboard over the unit square.
inline PointCoefficient checkerboard_function(double contrast, int tiles = 2) {
  require(contrast > 0.0 && tiles >= 1, "checkerboard: positive contrast and at least one tile required");
  return [contrast, tiles](const Point2& x) -> Eigen::Matrix2cd {
    const int i = static_cast<int>(std::floor(x.x() * tiles)), j = static_cast<int>(std::floor(x.y() * tiles));
    return (((i + j) % 2 != 0) ? contrast : 1.0) * Eigen::Matrix2cd::Identity();
  };
}

}  // namespace mixedreg::lab
