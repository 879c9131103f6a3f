#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/fem/coefficient.hpp"
#include "mixedreg/fem/mesher.hpp"
#include "mixedreg/geometry/scene.hpp"
#include "mixedreg/lab/interpolation.hpp"
#include "mixedreg/lab/lift.hpp"
#include "mixedreg/lab/meyers.hpp"
#include "mixedreg/lab/resolvent.hpp"
#include "mixedreg/lab/semigroup.hpp"
#include "mixedreg/lab/sweep.hpp"
#include "mixedreg/solvers/spectral.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace mixedreg;
using namespace mixedreg::lab;
namespace scenes = mixedreg::geometry::scenes;
namespace sel = mixedreg::fem::select;

namespace {

Eigen::Matrix2cd identity_at(const Point2&) { return Eigen::Matrix2cd::Identity(); }

fem::CoefficientField<2> rough_real(const fem::Mesh2& mesh, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.1, 10.0), a(0.0, 3.14159);
  std::vector<Eigen::Matrix2cd> mu;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    Eigen::Matrix2d r;
    const double th = a(rng);
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Matrix2d d = Eigen::Vector2d(u(rng), u(rng)).asDiagonal();
    mu.push_back((r * d * r.transpose()).cast<Complex>());
  }
  return fem::CoefficientField<2>(std::move(mu), "rough");
}

MeyersOptions checkerboard_options() {
  MeyersOptions o;
  o.levels = 4;
  o.interfaces = fem::tile_interfaces(2, {0, 0}, {1, 1});
  // opposite sources on the two high tiles drive current through the cross point
  o.rhs = [](const Point2& p) {
    const bool right = p.x() > 0.5, top = p.y() > 0.5;
    return Complex(right && !top ? 1.0 : (!right && top ? -1.0 : 0.0));
  };
  return o;
}

}  // namespace

TEST(SweepResult, CsvJsonAndValidation) {
  SweepResult r;
  r.axis_name = "p";
  r.axis = {2.0, 3.0};
  r.columns = {"a", "b"};
  r.values = {{1.0, 0.5}, {2.0, 0.25}};
  r.metadata["scene"] = "s";
  EXPECT_NO_THROW(r.validate());
  EXPECT_EQ(r.to_csv(), "p,a,b\n2,1,0.5\n3,2,0.25\n");
  EXPECT_EQ(r.to_json().at("metadata").at("scene"), "s");
  EXPECT_EQ(r.column("b"), 1u);
  EXPECT_THROW(r.column("c"), InvalidInput);

  const auto dir = std::filesystem::temp_directory_path() / "mixedreg_sweep_test";
  const auto files = r.write(dir, "unit_square", "meyers", "20260101T000000");
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "unit_square_meyers_20260101T000000.csv");
  std::ifstream in(files[0]);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, r.to_csv());
  std::filesystem::remove_all(dir);

  r.axis = {3.0, 2.0};
  EXPECT_THROW(r.validate(), InvalidInput);
  r.axis = {2.0, 3.0};
  r.values[1][0] = std::nan("");
  EXPECT_THROW(r.validate(), InvalidInput);
}

TEST(ParallelMap, OrderAndErrors) {
  const auto serial = parallel_map<double>(50, [](std::size_t i) { return std::sqrt(double(i)); }, 1);
  const auto threaded = parallel_map<double>(50, [](std::size_t i) { return std::sqrt(double(i)); }, 4);
  EXPECT_EQ(serial, threaded);
  EXPECT_THROW((parallel_map<int>(8, [](std::size_t i) -> int {
                  if (i == 5) throw NumericalFailure("job 5");
                  return 0;
                }, 3)),
               NumericalFailure);
}

TEST(Meyers, IdentityOnConvexSceneIsStable) {
  MeyersOptions o;
  o.levels = 4;
  const auto r = meyers_sweep(scenes::unit_square({0, 1, 2, 3}), identity_at, o);
  EXPECT_GE(r.p_crit, 6.0);
  const auto& t = r.table;
  for (std::size_t i = 0; i < t.axis.size(); ++i)
    if (t.axis[i] <= 4.0) {
      EXPECT_LT(std::abs(t.values[i][t.column("growth")] - 1.0), 0.02) << "p = " << t.axis[i];
    }
  EXPECT_EQ(r.mesh_sizes.size(), 4u);
  EXPECT_DOUBLE_EQ(r.mesh_sizes.back(), 0.1 / 8);
}

TEST(Meyers, MixedSlitBlowsUpAboveFour) {
  MeyersOptions o;
  o.levels = 4;
  const auto r = meyers_sweep(scenes::mixed_slit_square(), identity_at, o);
  const auto& t = r.table;
  for (std::size_t i = 0; i < t.axis.size(); ++i) {
    const double growth = t.values[i][t.column("growth")];
    if (t.axis[i] >= 4.0) {
      EXPECT_GE(growth, o.threshold) << "p = " << t.axis[i];
    }
    if (t.axis[i] <= 2.5) {
      EXPECT_LT(growth, o.threshold) << "p = " << t.axis[i];
    }
  }
  EXPECT_LT(r.p_crit, 4.0);
  EXPECT_GE(r.p_crit, 2.5);
}

TEST(Meyers, CheckerboardCriticalExponentDecreasesWithContrast) {
  const auto o = checkerboard_options();
  std::vector<double> pc;
  for (double k : {1.0, 10.0, 100.0}) pc.push_back(meyers_sweep(scenes::unit_square(), checkerboard_function(k), o).p_crit);
  EXPECT_GT(pc[0], pc[1]);
  EXPECT_GT(pc[1], pc[2]);
}

TEST(Meyers, Rejections) {
  MeyersOptions o;
  o.levels = 1;
  EXPECT_THROW(meyers_sweep(scenes::unit_square(), identity_at, o), InvalidInput);
  o.levels = 2;
  o.p_grid = {1.0, 2.0};
  EXPECT_THROW(meyers_sweep(scenes::unit_square(), identity_at, o), InvalidInput);
}

TEST(Interpolation, ConstantsAndRandomFunctions) {
  const auto mesh = fem::build_mesh(scenes::unit_square(), 0.1);
  const Vector<Complex> c = Vector<Complex>::Constant(static_cast<Eigen::Index>(mesh.num_vertices()), Complex(3.0, 4.0));
  const auto r = interpolation_check(mesh, c, 2.0, 4.0, 0.5);
  EXPECT_NEAR(r.lhs, 5.0, 1e-12);
  EXPECT_NEAR(r.rhs, 5.0, 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.p, 8.0 / 3.0);

  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    Vector<Complex> u(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = Complex(g(rng), g(rng));
    EXPECT_TRUE(interpolation_check(mesh, u, 2.0, 4.0, 0.5).pass);
  }
}

TEST(Interpolation, ThetaToZeroLimit) {
  const auto mesh = fem::build_mesh(scenes::l_shape(), 0.1);
  Vector<double> u(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) u(v) = std::sin(3 * mesh.vertices[v].x()) + mesh.vertices[v].y();
  const auto r = interpolation_check(mesh, u, 2.0, 6.0, 1e-6);
  EXPECT_NEAR(r.lhs, fem::w1p_norm(mesh, u, 2.0), 1e-4 * r.lhs);
  EXPECT_THROW(interpolation_check(mesh, u, 2.0, 2.0, 0.5), InvalidInput);
  EXPECT_THROW(interpolation_check(mesh, u, 2.0, 4.0, 1.0), InvalidInput);
  EXPECT_THROW(interpolation_check(mesh, u, 0.5, 4.0, 0.5), InvalidInput);
}

TEST(Resolvent, SelfAdjointSlice) {
  const auto mesh = fem::build_mesh(scenes::mixed_slit_square(), 0.15);
  const auto op = fem::assemble(mesh, fem::coefficients::identity(mesh), 1.0);
  EXPECT_LE(resolvent_norm(op, 0.0), 1.0 + 1e-10);
  for (double l : {1.0, 10.0, 100.0, 1000.0}) EXPECT_LE((1.0 + l) * resolvent_norm(op, l), 1.0 + 1e-8) << l;
  EXPECT_THROW(resolvent_norm(op, Complex(-1.0, 0.0)), InvalidInput);
}

TEST(Resolvent, MatchesDenseOracle) {
  const auto mesh = fem::build_mesh(scenes::l_shape({0}), 0.2);
  std::mt19937 rng(8);
  const auto op = fem::assemble(mesh, rough_real(mesh, rng), 1.0);
  ASSERT_LE(op.size(), 300u);
  const Complex lambda(3.0, -20.0);
  const DenseMatrix<Complex> a(op.A), g(op.G), m(op.mass);
  // f = G y: y ↦ G^{-1} M (A + λM)^{-1} G y in the G-norm
  const DenseMatrix<Complex> q = g.llt().solve(DenseMatrix<Complex>(m * (a + lambda * m).lu().solve(g)));
  EXPECT_NEAR(resolvent_norm(op, lambda), solvers::dense_g_norm<Complex>(q, g), 1e-8);
}

TEST(Resolvent, RayGridSupIsFinite) {
  const auto mesh = fem::build_mesh(scenes::unit_square(), 0.15);
  std::mt19937 rng(9);
  // pure Neumann: constants give the λ = 0 value 1, the large-|λ| limit of the scaled norm
  const auto op = fem::assemble(mesh, rough_real(mesh, rng), 1.0, sel::nowhere());
  const auto grid = ray_grid();
  EXPECT_EQ(grid.size(), 26u);
  const auto serial = resolvent_sweep(op, grid, 1);
  const auto threaded = resolvent_sweep(op, grid, 4);
  EXPECT_EQ(serial.table.to_csv(), threaded.table.to_csv());
  const double at_zero = serial.table.values[0][serial.table.column("scaled")];
  EXPECT_TRUE(std::isfinite(serial.sup_scaled));
  EXPECT_LE(serial.sup_scaled, 3.0 * at_zero);
}

TEST(Lift, CaseSplit) {
  const auto mesh = fem::build_mesh(scenes::unit_square(), 0.3);
  const auto id = fem::coefficients::identity(mesh);
  const auto real = lift_coefficient(id, Complex(1.0));
  EXPECT_TRUE(real.block_structure_exact());
  EXPECT_EQ(Eigen::Matrix2cd(real.cells[0].topLeftCorner<2, 2>()), Eigen::Matrix2cd::Identity());
  EXPECT_EQ(real.cells[0](2, 2), Complex(1.0));

  const auto imag = lift_coefficient(id, Complex(0.0, 1.0));
  EXPECT_TRUE(imag.block_structure_exact());
  EXPECT_EQ(imag.cells[0](0, 0), Complex(1.0, -0.5));
  EXPECT_EQ(imag.cells[0](0, 1), Complex(0.0));
  EXPECT_NEAR(std::abs(imag.cells[0](2, 2) - Complex(0.5, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(imag.kappa_tilde, 0.5, 1e-12);

  EXPECT_THROW(lift_coefficient(id, Complex(0.0)), InvalidInput);
  EXPECT_THROW(lift_coefficient(id, Complex(-1.0, 1.0)), InvalidInput);
}

TEST(Lift, UniformOverGrid) {
  const auto mesh = fem::build_mesh(scenes::unit_square(), 0.2);
  std::mt19937 rng(10);
  const auto mu = rough_real(mesh, rng);
  const auto grid = lift_grid();
  ASSERT_EQ(grid.size(), 40u);
  double kmin = 1e300, bmax = 0.0;
  for (const auto& l : grid) {
    const auto lc = lift_coefficient(mu, l);
    EXPECT_TRUE(lc.block_structure_exact());
    kmin = std::min(kmin, lc.kappa_tilde);
    bmax = std::max(bmax, lc.bound_tilde);
  }
  EXPECT_GT(kmin, 0.0);
  EXPECT_TRUE(std::isfinite(bmax));
  // Re(μ̃ξ·ξ̄) ≥ μ_•/2 whatever λ is
  EXPECT_GE(kmin, 0.5 * mu.ellipticity() - 1e-12);
}

TEST(Semigroup, ExponentialLawAndReconstruction) {
  const auto mesh = fem::build_mesh(scenes::mixed_slit_square(), 0.12);
  std::mt19937 rng(11);
  const auto op = fem::assemble(mesh, rough_real(mesh, rng), 1.0);
  ASSERT_LE(op.size(), 2000u);
  double prev = 1e300;
  for (double t : {0.1, 0.5, 1.0}) {
    const auto r = semigroup_kernel(mesh, op, t, {2.0, 4.0}, 5);
    EXPECT_LE(r.semigroup_error, 1e-10);
    EXPECT_LE(r.reconstruction_error, 1e-8);
    EXPECT_LT(r.nuclear_norm, prev);
    prev = r.nuclear_norm;
    EXPECT_EQ(r.factors.values.size(), 5u);
    for (std::size_t j = 1; j < r.singular_values.size(); ++j) EXPECT_LE(r.singular_values[j], r.singular_values[j - 1]);
  }
}

TEST(Semigroup, RejectsNonHermitian) {
  const auto mesh = fem::build_mesh(scenes::unit_square(), 0.3);
  std::vector<Eigen::Matrix2cd> mu(mesh.num_cells(), Eigen::Matrix2cd::Identity());
  for (auto& m : mu) m(0, 1) = 0.3;
  const auto op = fem::assemble(mesh, fem::CoefficientField<2>(mu), 1.0);
  EXPECT_THROW(semigroup_kernel(mesh, op, 1.0), InvalidInput);
  const auto ok = fem::assemble(mesh, fem::coefficients::identity(mesh), 1.0);
  EXPECT_THROW(semigroup_kernel(mesh, ok, 0.0), InvalidInput);
}
