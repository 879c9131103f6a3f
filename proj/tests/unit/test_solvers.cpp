#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/fem/coefficient.hpp"
#include "mixedreg/fem/mesher.hpp"
#include "mixedreg/geometry/scene.hpp"
#include "mixedreg/solvers/direct.hpp"
#include "mixedreg/solvers/groeger.hpp"
#include "mixedreg/solvers/linear_map.hpp"
#include "mixedreg/solvers/spectral.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mixedreg;
using namespace mixedreg::fem;
using namespace mixedreg::solvers;
namespace scenes = mixedreg::geometry::scenes;

namespace {

CoefficientField<2> random_coefficient(const Mesh2& mesh, std::mt19937& rng, bool hermitian) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Matrix2cd> mu;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    Eigen::Matrix2cd b;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) b(i, j) = Complex(u(rng), u(rng));
    Eigen::Matrix2cd m = b.adjoint() * b + 0.5 * Eigen::Matrix2cd::Identity();
    if (!hermitian) m(0, 1) += Complex(0.4 * u(rng), 0.4 * u(rng));
    mu.push_back(m);
  }
  return CoefficientField<2>(std::move(mu));
}

Vector<Complex> load(const Mesh2& mesh, const DofMap& dofs) {
  return assemble_load<Complex, 2>(mesh, dofs, [](const Point2& p) { return Complex(1.0 + p.x(), p.y()); });
}

}  // namespace

TEST(SolveDirect, PureNeumannConstant) {
  const auto mesh = build_mesh(scenes::unit_square(), 0.15);
  const auto op = assemble(mesh, coefficients::identity(mesh), 1.0, select::nowhere());
  const auto f = assemble_load<Complex, 2>(mesh, op.dofs, [](const Point2&) { return Complex(1.0); });
  const auto u = solve_direct(op.A, f);
  EXPECT_LE((u - Vector<Complex>::Ones(u.size())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SolveDirect, ShiftZeroWithDirichletIsRegular) {
  const auto mesh = build_mesh(scenes::unit_square({0}), 0.15);
  const auto op = assemble(mesh, coefficients::identity(mesh), 0.0);
  const auto f = load(mesh, op.dofs);
  const auto u = solve_direct(op.A, f);
  EXPECT_LE((op.A * u - f).norm(), 1e-10 * f.norm());
}

TEST(SolveDirect, ShiftZeroNeumannIsSingular) {
  const auto mesh = build_mesh(scenes::unit_square(), 0.15);
  const auto op = assemble(mesh, coefficients::identity(mesh), 0.0, select::nowhere());
  const auto f = load(mesh, op.dofs);
  try {
    solve_direct(op.A, f);
    FAIL() << "singular operator accepted";
  } catch (const SingularOperator<Complex>& e) {
    const auto& v = e.near_null();
    // the near-null vector is a constant
    const Complex c = v(0);
    EXPECT_GT(std::abs(c), 0.0);
    EXPECT_LE((v - c * Vector<Complex>::Ones(v.size())).norm(), 1e-6);
  }
}

TEST(Groeger, StepAndBound) {
  const auto [t0, bound] = groeger_step(1.0, 3.0);
  EXPECT_DOUBLE_EQ(t0, 0.5);
  EXPECT_DOUBLE_EQ(bound, 0.5);
  EXPECT_THROW(groeger_step(0.0, 1.0), InvalidInput);
  EXPECT_THROW(groeger_step(2.0, 1.0), InvalidInput);
}

TEST(Groeger, GramOperatorConvergesInOneStep) {
  const auto mesh = build_mesh(scenes::unit_square({0}), 0.2);
  auto op = assemble(mesh, coefficients::identity(mesh), 1.0);
  op.A = op.G;
  const auto f = load(mesh, op.dofs);
  const auto [u, rep] = groeger_solve(op, f, 1.0, 1.0);
  EXPECT_EQ(rep.iterations, 1);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE((op.G * u - f).norm(), 1e-10 * f.norm());
}

TEST(Groeger, AgreesWithDirectAndErrorDecreases) {
  std::mt19937 rng(3);
  for (bool hermitian : {true, false}) {
    const auto mesh = build_mesh(scenes::mixed_slit_square(), 0.15);
    const auto op = assemble(mesh, random_coefficient(mesh, rng, hermitian), 1.0);
    const auto f = load(mesh, op.dofs);
    const auto exact = solve_direct(op.A, f);
    const GramSolver<Complex> g(op.G);
    std::vector<double> errors;
    GroegerOptions<Complex> opt;
    opt.observer = [&](int, const Vector<Complex>& u) { errors.push_back(g.norm(Vector<Complex>(u - exact))); };
    const auto [u, rep] = groeger_solve(op, f, opt);
    EXPECT_TRUE(rep.converged);
    // a step below tol·‖u‖ leaves an error below tol·‖u‖·q/(1 − q)
    const double q = rep.rate_bound;
    EXPECT_LE(g.norm(Vector<Complex>(u - exact)), 10.0 * opt.tolerance * g.norm(exact) * std::max(1.0, q / (1.0 - q)));
    EXPECT_LE(rep.observed_rate, rep.rate_bound + 1e-8);
    for (std::size_t k = 1; k < errors.size(); ++k)
      if (errors[k - 1] > 1e-12 * g.norm(exact)) {
        EXPECT_LE(errors[k], errors[k - 1] * (1.0 + 1e-12));
      }
  }
}

TEST(Groeger, RefusesNonsymmetricSystems) {
  const auto mesh = build_mesh(scenes::unit_square({0}), 0.3);
  DiscreteOperator<double> op;
  op.dofs = DofMap(mesh, std::vector<FacetSelector>{select::tagged(0), select::tagged(0)});
  auto [g, mass] = assemble_gram<double>(mesh, op.dofs);
  op.G = g;
  op.mass = mass;
  op.A = g;
  op.A.coeffRef(0, 1) += 0.1;
  const Vector<double> f = Vector<double>::Ones(op.A.rows());
  EXPECT_THROW(groeger_solve(op, f, 1.0, 2.0), InvalidInput);
}

TEST(Groeger, DivergenceIsReported) {
  const auto mesh = build_mesh(scenes::unit_square({0}), 0.2);
  const auto op = assemble(mesh, coefficients::scalar(mesh, Complex(50.0)), 1.0);
  const auto f = load(mesh, op.dofs);
  EXPECT_THROW(groeger_solve(op, f, 0.5, 1.0), NumericalFailure);
}

TEST(Groeger, ReportSerializes) {
  SolveReport rep;
  rep.iterations = 4;
  rep.residual_history = {1.0, 0.5};
  rep.m = 3.0;
  const auto j = rep.to_json();
  EXPECT_EQ(j.at("iterations"), 4);
  EXPECT_EQ(j.at("residual_history").size(), 2u);
  EXPECT_DOUBLE_EQ(j.at("M").get<double>(), 3.0);
  EXPECT_FALSE(j.at("converged").get<bool>());
}

TEST(OperatorNorm, IdentityZeroAndDenseOracle) {
  const auto mesh = build_mesh(scenes::l_shape({0}), 0.2);
  ASSERT_LE(mesh.num_vertices(), 300u);
  std::mt19937 rng(4);
  const auto op = assemble(mesh, random_coefficient(mesh, rng, false), 1.0);
  const GramSolver<Complex> g(op.G);
  const auto n = static_cast<Eigen::Index>(op.size());
  EXPECT_NEAR(operator_norm(LinearMap<Complex>::identity(n), g), 1.0, 1e-10);
  EXPECT_NEAR(operator_norm(LinearMap<Complex>::zero(n), g), 0.0, 1e-10);

  const auto est = estimate_coercivity(op);
  const double t0 = groeger_step(est.kappa_hat, est.m_hat).first;
  const DenseMatrix<Complex> gd(op.G), ad(op.A);
  const DenseMatrix<Complex> q = DenseMatrix<Complex>::Identity(n, n) - t0 * gd.llt().solve(ad);
  const LinearMap<Complex> qmap{n, [&](const Vector<Complex>& x) { return Vector<Complex>(x - t0 * g.solve(op.A * x)); },
                                [&](const Vector<Complex>& x) {
                                  return Vector<Complex>(x - t0 * op.A.adjoint() * g.solve(x));
                                }};
  const double oracle = dense_g_norm<Complex>(q, gd);
  EXPECT_NEAR(operator_norm(qmap, g), oracle, 1e-8 * oracle);
  EXPECT_LT(oracle, 1.0);
}

TEST(Coercivity, IdentityAndScaledCoefficient) {
  const auto mesh = build_mesh(scenes::unit_square(), 0.2);
  const auto op = assemble(mesh, coefficients::identity(mesh), 1.0, select::nowhere());
  const auto e = estimate_coercivity(op);
  EXPECT_NEAR(e.kappa_hat, 1.0, 1e-8);
  EXPECT_NEAR(e.m_hat, 1.0, 1e-8);
  EXPECT_TRUE(e.coercive);

  const auto op2 = assemble(mesh, coefficients::scalar(mesh, Complex(2.0)), 1.0, select::nowhere());
  const auto e2 = estimate_coercivity(op2);
  EXPECT_NEAR(e2.kappa_hat, 1.0, 1e-8);
  // sup of (2K + M)/(K + M) is reached only as the mass share vanishes
  EXPECT_LE(e2.m_hat, 2.0 + 1e-10);
  EXPECT_GE(e2.m_hat, 1.9);
}

TEST(Coercivity, MatchesDenseOracle) {
  std::mt19937 rng(5);
  const auto mesh = build_mesh(scenes::mixed_slit_square(), 0.2);
  ASSERT_LE(mesh.num_vertices(), 300u);
  for (bool hermitian : {true, false}) {
    const auto op = assemble(mesh, random_coefficient(mesh, rng, hermitian), 0.5);
    const auto e = estimate_coercivity(op);
    const auto d = dense_coercivity(op);
    EXPECT_NEAR(e.kappa_hat, d.kappa_hat, 1e-8 * d.m_hat);
    EXPECT_NEAR(e.m_hat, d.m_hat, 1e-8 * d.m_hat);
  }
}

TEST(Coercivity, NonCoerciveIsFlagged) {
  const auto mesh = build_mesh(scenes::unit_square(), 0.25);
  auto op = assemble(mesh, coefficients::identity(mesh), 1.0, select::nowhere());
  op.A = -op.A;
  const auto e = estimate_coercivity(op);
  EXPECT_FALSE(e.coercive);
  const Vector<Complex> f = Vector<Complex>::Ones(op.A.rows());
  EXPECT_THROW(groeger_solve(op, f), InvalidInput);
}
