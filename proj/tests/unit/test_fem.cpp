#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/fem/coefficient.hpp"
#include "mixedreg/fem/dofs.hpp"
#include "mixedreg/fem/mesh.hpp"
#include "mixedreg/fem/mesh_io.hpp"
#include "mixedreg/fem/mesher.hpp"
#include "mixedreg/fem/zero_extend.hpp"
#include "mixedreg/geometry/collapse.hpp"
#include "mixedreg/geometry/scene.hpp"

#include <Eigen/SparseLU>
#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace mixedreg;
using namespace mixedreg::fem;
namespace scenes = mixedreg::geometry::scenes;

namespace {

std::vector<geometry::PlanarScene> suite_scenes() {
  return {scenes::unit_square({0}), scenes::slit_square(), scenes::mixed_slit_square(), scenes::l_shape({0, 1}),
          scenes::disc(48)};
}

// Random elliptic complex coefficient per cell: Hermitian part ≥ floor.
CoefficientField<2> random_coefficient(const Mesh2& mesh, std::mt19937& rng, double floor = 0.5, bool hermitian = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Matrix2cd> mu;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    Eigen::Matrix2cd b;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) b(i, j) = Complex(u(rng), u(rng));
    Eigen::Matrix2cd m = b.adjoint() * b + floor * Eigen::Matrix2cd::Identity();
    if (!hermitian) {
      Eigen::Matrix2cd k;
      k << Complex(0, u(rng)), Complex(u(rng), u(rng)), 0, Complex(0, u(rng));
      k(1, 0) = -std::conj(k(0, 1));
      m += k;  // skew-Hermitian part leaves Re(μξ·ξ̄) unchanged
    }
    mu.push_back(m);
  }
  return CoefficientField<2>(std::move(mu));
}

Vector<Complex> solve(const SparseMatrix<Complex>& a, const Vector<Complex>& f) {
  Eigen::SparseLU<SparseMatrix<Complex>> lu(a);
  EXPECT_EQ(lu.info(), Eigen::Success);
  return lu.solve(f);
}

Vector<Complex> random_vector(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Vector<Complex> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

std::map<std::pair<int, int>, int> edge_census(const Mesh2& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.cells)
    for (int k = 0; k < 3; ++k) count[std::minmax(t[k], t[(k + 1) % 3])]++;
  return count;
}

}  // namespace

TEST(Mesher, UnitSquareCensus) {
  const auto mesh = build_mesh(scenes::unit_square(), 0.25);
  EXPECT_GE(mesh.num_cells(), 32u);
  EXPECT_LE(mesh.h(), 1.5 * 0.25);
  EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-14);
  for (const auto& f : mesh.boundary) EXPECT_GE(f.label, 0);
  double perimeter = 0.0;
  for (const auto& f : mesh.boundary) perimeter += (mesh.vertices[f.vertices[0]] - mesh.vertices[f.vertices[1]]).norm();
  EXPECT_NEAR(perimeter, 4.0, 1e-14);
}

TEST(Mesher, ConformingAndPositive) {
  for (const auto& scene : suite_scenes()) {
    const auto mesh = build_mesh(scene, 0.1);
    mesh.validate();
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) EXPECT_GT(mesh.signed_volume(c), 0.0);
    EXPECT_LE(mesh.h(), 1.5 * 0.1) << scene.name();
    EXPECT_NEAR(mesh.total_volume(), scene.area(), 1e-12) << scene.name();
    // every edge is shared by at most two cells, boundary edges by exactly one
    std::set<std::pair<int, int>> facets;
    for (const auto& f : mesh.boundary) facets.insert(std::minmax(f.vertices[0], f.vertices[1]));
    for (auto [e, n] : edge_census(mesh)) {
      EXPECT_LE(n, 2);
      EXPECT_EQ(n == 1, facets.count(e) == 1) << scene.name();
    }
  }
}

TEST(Mesher, DirichletSegmentsAreUnionsOfEdges) {
  for (const auto& scene : suite_scenes()) {
    const auto mesh = build_mesh(scene, 0.1);
    double tagged = 0.0;
    for (const auto& f : mesh.boundary)
      if (f.dirichlet & 1u) tagged += (mesh.vertices[f.vertices[0]] - mesh.vertices[f.vertices[1]]).norm();
    // a two-sided slit piece is tagged on both faces
    double expected = 0.0;
    for (const auto& d : scene.dirichlet()) {
      bool on_slit = false;
      for (const auto& s : scene.slit_edges()) on_slit |= geometry::point_segment_distance(0.5 * (d.segment.a + d.segment.b), s) < 1e-12;
      expected += d.segment.length() * ((on_slit && d.side == geometry::Side::both) ? 2.0 : 1.0);
    }
    EXPECT_NEAR(tagged, expected, 1e-12) << scene.name();
  }
}

TEST(Mesher, SlitDuplicatesVertices) {
  const auto scene = scenes::slit_square();
  const auto mesh = build_mesh(scene, 0.1);
  std::set<std::pair<double, double>> positions;
  for (const auto& v : mesh.vertices) positions.insert({v.x(), v.y()});
  EXPECT_GT(mesh.num_vertices(), positions.size());
  // the slit carries boundary facets on both faces
  int slit_facets = 0;
  for (const auto& f : mesh.boundary) slit_facets += f.label >= static_cast<int>(scene.loop_edges().size());
  EXPECT_EQ(slit_facets % 2, 0);
  EXPECT_GT(slit_facets, 0);
}

TEST(Mesher, Rejections) {
  EXPECT_THROW(geometry::PlanarScene("bad", scenes::square_loop(), {}, {{Point2(0.5, 0.5), Point2(0.5, 0.5)}}),
               InvalidInput);
  const geometry::Segment a{Point2(0.2, 0.2), Point2(0.8, 0.8)}, b{Point2(0.2, 0.8), Point2(0.8, 0.2)};
  EXPECT_THROW(build_mesh(scenes::unit_square(), 0.1, {a, b}), InvalidInput);
  EXPECT_THROW(build_mesh(scenes::unit_square(), 0.0), InvalidInput);
  EXPECT_THROW(build_mesh(scenes::unit_square(), 1e-4), InvalidInput);
}

TEST(Mesher, InterfacesAreMeshEdges) {
  const auto ifaces = tile_interfaces(2, Point2(0, 0), Point2(1, 1));
  const auto mesh = build_mesh(scenes::unit_square(), 0.1, ifaces);
  const auto mu = coefficients::checkerboard(mesh, 10.0);
  // no cell straddles a tile line
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    bool lx = false, hx = false, ly = false, hy = false;
    for (int v : mesh.cells[c]) {
      const Point2& x = mesh.vertices[v];
      lx |= x.x() < 0.5 - 1e-12;
      hx |= x.x() > 0.5 + 1e-12;
      ly |= x.y() < 0.5 - 1e-12;
      hy |= x.y() > 0.5 + 1e-12;
    }
    EXPECT_FALSE(lx && hx);
    EXPECT_FALSE(ly && hy);
  }
  EXPECT_DOUBLE_EQ(mu.ellipticity(), 1.0);
  EXPECT_DOUBLE_EQ(mu.bound(), 10.0);
}

TEST(Mesh, UniformRefineKeepsTagsAndArea) {
  const auto coarse = build_mesh(scenes::mixed_slit_square(), 0.2);
  const auto fine = uniform_refine(coarse);
  fine.validate();
  EXPECT_EQ(fine.num_cells(), 4 * coarse.num_cells());
  EXPECT_NEAR(fine.total_volume(), coarse.total_volume(), 1e-14);
  EXPECT_NEAR(fine.h(), 0.5 * coarse.h(), 1e-14);
  EXPECT_EQ(fine.boundary.size(), 2 * coarse.boundary.size());
  auto tagged_length = [](const Mesh2& m) {
    double l = 0.0;
    for (const auto& f : m.boundary)
      if (f.dirichlet) l += (m.vertices[f.vertices[0]] - m.vertices[f.vertices[1]]).norm();
    return l;
  };
  EXPECT_NEAR(tagged_length(fine), tagged_length(coarse), 1e-14);
  for (std::size_t c = 0; c < coarse.num_cells(); ++c)
    for (int k = 0; k < 4; ++k)
      EXPECT_NEAR((fine.centroid(4 * c + k) - coarse.centroid(c)).norm(), 0.0, coarse.cell_diameter(c));
}

TEST(Mesh, UnitCube) {
  const auto mesh = unit_cube_mesh(3);
  mesh.validate();
  EXPECT_EQ(mesh.num_cells(), 6u * 27u);
  EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-14);
  std::map<int, double> area;
  for (const auto& f : mesh.boundary)
    area[f.label] += 0.5 * (mesh.vertices[f.vertices[1]] - mesh.vertices[f.vertices[0]])
                               .cross(mesh.vertices[f.vertices[2]] - mesh.vertices[f.vertices[0]])
                               .norm();
  ASSERT_EQ(area.size(), 6u);
  for (auto [label, a] : area) EXPECT_NEAR(a, 1.0, 1e-14) << label;
}

TEST(MeshIo, RoundTrip) {
  const auto mesh = build_mesh(scenes::slit_square(), 0.2);
  std::stringstream s;
  write_mesh(s, mesh);
  const auto back = read_mesh<2>(s);
  ASSERT_EQ(back.num_vertices(), mesh.num_vertices());
  ASSERT_EQ(back.num_cells(), mesh.num_cells());
  ASSERT_EQ(back.boundary.size(), mesh.boundary.size());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) EXPECT_EQ(back.vertices[v], mesh.vertices[v]);
  for (std::size_t k = 0; k < mesh.boundary.size(); ++k) {
    EXPECT_EQ(back.boundary[k].cell, mesh.boundary[k].cell);
    EXPECT_EQ(back.boundary[k].dirichlet, mesh.boundary[k].dirichlet);
    EXPECT_EQ(back.boundary[k].label, mesh.boundary[k].label);
  }
  const auto cube = unit_cube_mesh(2);
  std::stringstream c;
  write_mesh(c, cube);
  EXPECT_EQ(read_mesh<3>(c).num_cells(), cube.num_cells());

  std::istringstream bad("DIMENSION 2\nNODES 1\n0 0.0\n");
  try {
    read_mesh<2>(bad);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream wrong_dim("DIMENSION 3\n");
  EXPECT_THROW(read_mesh<2>(wrong_dim), InvalidInput);
}

TEST(MeshIo, SolutionCsv) {
  Vector<Complex> u(2);
  u << Complex(1, 2), Complex(3, -4);
  std::ostringstream out;
  write_solution_csv(out, u);
  EXPECT_EQ(out.str(), "vertex,re,im\n0,1,2\n1,3,-4\n");
  Vector<double> w(4);
  w << 1, 2, 3, 4;
  std::ostringstream o2;
  write_solution_csv(o2, w, 2);
  EXPECT_EQ(o2.str(), "vertex,value0,value1\n0,1,2\n1,3,4\n");
}

TEST(Assemble, ConstantSolvesPureNeumann) {
  const auto mesh = build_mesh(scenes::l_shape(), 0.1);
  std::mt19937 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = random_coefficient(mesh, rng);
    const auto op = assemble(mesh, mu, 1.0, select::nowhere());
    EXPECT_EQ(op.size(), mesh.num_vertices());
    const auto f = assemble_load<Complex, 2>(mesh, op.dofs, [](const Point2&) { return Complex(1.0); });
    const auto u = solve(op.A, f);
    EXPECT_LE((u - Vector<Complex>::Ones(u.size())).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Assemble, HermitianAndElliptic) {
  std::mt19937 rng(2);
  for (const auto& scene : suite_scenes()) {
    const auto mesh = build_mesh(scene, 0.15);
    const auto herm = random_coefficient(mesh, rng, 0.3, true);
    const auto op_h = assemble(mesh, herm, 1.0);
    const SparseMatrix<Complex> diff = op_h.A - SparseMatrix<Complex>(op_h.A.adjoint());
    EXPECT_LE(diff.cwiseAbs().sum() / op_h.A.cwiseAbs().sum(), 1e-12);

    const auto mu = random_coefficient(mesh, rng, 0.3);
    for (double shift : {1.0, 0.25}) {
      const auto op = assemble(mesh, mu, shift);
      const double floor = std::min(mu.ellipticity(), shift);
      for (int k = 0; k < 100; ++k) {
        const auto u = random_vector(static_cast<Eigen::Index>(op.size()), rng);
        const double a = (u.adjoint() * op.A * u)(0).real();
        const double g = (u.adjoint() * op.G * u)(0).real();
        EXPECT_GE(a, floor * g - 1e-12 * g);
      }
    }
    // G is Hermitian with positive diagonal
    for (Eigen::Index i = 0; i < op_h.G.rows(); ++i) EXPECT_GT(op_h.G.coeff(i, i).real(), 0.0);
    EXPECT_LE(SparseMatrix<Complex>(op_h.G - SparseMatrix<Complex>(op_h.G.adjoint())).cwiseAbs().sum(), 1e-12 * op_h.G.cwiseAbs().sum());
  }
}

TEST(Assemble, DirichletEliminationAndRejections) {
  const auto mesh = build_mesh(scenes::unit_square({0, 1, 2, 3}), 0.2);
  const auto op = assemble(mesh, coefficients::identity(mesh), 1.0);
  std::size_t boundary_vertices = 0;
  std::set<int> on_boundary;
  for (const auto& f : mesh.boundary) on_boundary.insert(f.vertices.begin(), f.vertices.end());
  boundary_vertices = on_boundary.size();
  EXPECT_EQ(op.size(), mesh.num_vertices() - boundary_vertices);
  EXPECT_EQ(op.A.rows(), op.G.rows());

  const auto bad = coefficients::scalar(mesh, Complex(-1.0));
  EXPECT_THROW(assemble(mesh, bad, 1.0), InvalidInput);
  const auto zero = coefficients::scalar(mesh, Complex(0.0));
  EXPECT_THROW(assemble(mesh, zero, 1.0), InvalidInput);
  const auto other = build_mesh(scenes::unit_square(), 0.3);
  EXPECT_THROW(assemble(mesh, coefficients::identity(other), 1.0), InvalidInput);
  EXPECT_THROW(assemble(mesh, coefficients::identity(mesh), -1.0), InvalidInput);
}

TEST(Assemble, StiffnessOracleOnReferenceTriangle) {
  Mesh2 mesh;
  mesh.vertices = {Point2(0, 0), Point2(1, 0), Point2(0, 1)};
  mesh.cells = {{0, 1, 2}};
  const auto op = assemble(mesh, coefficients::identity(mesh), 0.0, select::nowhere());
  Eigen::Matrix3d k;
  k << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
  Eigen::Matrix3d m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  m /= 24.0;
  EXPECT_LE((DenseMatrix<Complex>(op.A).real() - k).norm(), 1e-15);
  EXPECT_LE((DenseMatrix<Complex>(op.mass).real() - m).norm(), 1e-15);
  EXPECT_LE((DenseMatrix<Complex>(op.G).real() - k - m).norm(), 1e-15);
}

TEST(Assemble, ThreadedMergeIsDeterministic) {
  const auto mesh = build_mesh(scenes::disc(64), 0.05);
  std::mt19937 rng(3);
  const auto mu = random_coefficient(mesh, rng);
  const auto a1 = assemble(mesh, mu, 1.0, select::nowhere(), {1});
  const auto a1b = assemble(mesh, mu, 1.0, select::nowhere(), {1});
  const auto a4 = assemble(mesh, mu, 1.0, select::nowhere(), {4});
  EXPECT_EQ(SparseMatrix<Complex>(a1.A - a1b.A).cwiseAbs().sum(), 0.0);
  EXPECT_LE(SparseMatrix<Complex>(a1.A - a4.A).cwiseAbs().sum(), 1e-13 * a1.A.cwiseAbs().sum());
}

TEST(AssembleLoad, BoundaryAndDomainSums) {
  const auto mesh = build_mesh(scenes::unit_square({0}), 0.1);
  const DofMap dofs(mesh, {select::nowhere()});
  const auto area = assemble_load<Complex, 2>(mesh, dofs, [](const Point2&) { return Complex(1.0); });
  EXPECT_NEAR(area.sum().real(), 1.0, 1e-12);

  // density 1 on the three Neumann sides
  const DofMap dd(mesh, {select::tagged(0)});
  const auto edge = assemble_load<Complex, 2>(
      mesh, dofs, {}, [](const Point2&, const BoundaryFacet& f) { return f.dirichlet ? Complex(0.0) : Complex(1.0); });
  EXPECT_NEAR(edge.sum().real(), 3.0, 1e-12);

  auto everywhere = [](const Point2&, const BoundaryFacet&) { return Complex(1.0); };
  EXPECT_THROW((assemble_load<Complex, 2>(mesh, dd, {}, everywhere)), InvalidInput);
}

TEST(AssembleLoad, SymmetricUnderMeshSymmetry) {
  // mesh of the unit square mirrored by x ↦ 1 − x to obtain an exactly symmetric mesh
  const auto half = build_mesh(geometry::PlanarScene("half", {{0, 0}, {0.5, 0}, {0.5, 1}, {0, 1}}), 0.1);
  Mesh2 mesh = half;
  std::map<std::pair<long long, long long>, int> index;
  auto key = [](const Point2& p) { return std::pair{std::llround(p.x() * 1e9), std::llround(p.y() * 1e9)}; };
  for (std::size_t v = 0; v < half.num_vertices(); ++v) index[key(half.vertices[v])] = static_cast<int>(v);
  std::vector<int> mirror(half.num_vertices());
  for (std::size_t v = 0; v < half.num_vertices(); ++v) {
    const Point2 p(1.0 - half.vertices[v].x(), half.vertices[v].y());
    auto it = index.find(key(p));
    if (it != index.end()) {
      mirror[v] = it->second;
    } else {
      mirror[v] = static_cast<int>(mesh.vertices.size());
      index[key(p)] = mirror[v];
      mesh.vertices.push_back(p);
    }
  }
  for (const auto& t : half.cells) mesh.cells.push_back({mirror[t[0]], mirror[t[2]], mirror[t[1]]});
  mesh.boundary.clear();
  const int cells = static_cast<int>(half.num_cells());
  for (const auto& f : half.boundary) {
    const Point2 a = half.vertices[f.vertices[0]], b = half.vertices[f.vertices[1]];
    if (a.x() == 0.5 && b.x() == 0.5) continue;
    mesh.boundary.push_back(f);
    mesh.boundary.push_back({{mirror[f.vertices[1]], mirror[f.vertices[0]]}, f.cell + cells, 0u, f.label});
  }
  mesh.validate();
  std::vector<int> perm(mesh.num_vertices());
  std::map<std::pair<long long, long long>, int> all;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) all[key(mesh.vertices[v])] = static_cast<int>(v);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) perm[v] = all.at(key(Point2(1.0 - mesh.vertices[v].x(), mesh.vertices[v].y())));

  const DofMap dofs(mesh, {select::nowhere()});
  auto g = [](const Point2& x, const BoundaryFacet&) { return Complex(std::cos(3 * (x.x() - 0.5)) + x.y()); };
  const auto f = assemble_load<Complex, 2>(mesh, dofs, {}, g);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) EXPECT_NEAR(std::abs(f(v) - f(perm[v])), 0.0, 1e-15);
}

TEST(W1pNorm, ConstantsAndGramAgreement) {
  const auto mesh = build_mesh(scenes::unit_square({0, 2}), 0.1);
  Vector<Complex> c = Vector<Complex>::Constant(static_cast<Eigen::Index>(mesh.num_vertices()), Complex(0.6, -0.8));
  for (double p : {1.0, 1.5, 2.0, 3.7, 8.0}) EXPECT_NEAR(w1p_norm(mesh, c, p), 1.0, 1e-13);
  EXPECT_THROW(w1p_norm(mesh, c, 0.5), InvalidInput);

  const auto op = assemble(mesh, coefficients::identity(mesh), 1.0);
  std::mt19937 rng(4);
  for (int k = 0; k < 10; ++k) {
    const auto u = random_vector(static_cast<Eigen::Index>(op.size()), rng);
    const double g = std::sqrt((u.adjoint() * op.G * u)(0).real());
    EXPECT_NEAR(w1p_norm(mesh, op.dofs.expand(u), 2.0), g, 1e-10 * g);
  }
}

TEST(W1pNorm, LogConvexInReciprocalExponent) {
  const auto mesh = build_mesh(scenes::slit_square(), 0.15);
  std::mt19937 rng(5);
  const std::vector<double> ps{1.5, 2, 3, 4, 6};
  for (int k = 0; k < 100; ++k) {
    const auto u = random_vector(static_cast<Eigen::Index>(mesh.num_vertices()), rng);
    std::map<double, double> n;
    for (double p : ps) n[p] = w1p_norm(mesh, u, p);
    for (std::size_t a = 0; a < ps.size(); ++a)
      for (std::size_t b = a + 1; b < ps.size(); ++b)
        for (std::size_t m = b + 1; m < ps.size(); ++m) {
          const double p0 = ps[a], p = ps[b], p1 = ps[m];
          const double theta = (1 / p0 - 1 / p) / (1 / p0 - 1 / p1);
          EXPECT_LE(n[p], std::pow(n[p0], 1 - theta) * std::pow(n[p1], theta) * (1 + 1e-12));
        }
  }
}

TEST(ZeroExtend, IsometryOnSlitScenes) {
  const std::vector<Point2> bent{{0.2, 0.3}, {0.5, 0.3}, {0.5, 0.7}};
  const geometry::PlanarScene bent_slit("bent_slit", scenes::square_loop(), {}, {bent},
                                        {{{bent[0], bent[1]}, geometry::Side::both}, {{bent[1], bent[2]}, geometry::Side::both}});
  for (const auto& scene : {scenes::slit_square(), bent_slit}) {
    const auto mesh = build_mesh(scene, 0.1);
    const geometry::SegmentSet crack(scene.slit_edges());
    const auto collapsed = geometry::collapse_crack(scene, crack);
    EXPECT_TRUE(collapsed.slits().empty());
    const auto big = merge_crack(mesh, crack);
    big.validate();
    EXPECT_NEAR(big.total_volume(), collapsed.area(), 1e-12);
    EXPECT_LT(big.num_vertices(), mesh.num_vertices());
    // u vanishes on the slit, arbitrary elsewhere
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> r(-1, 1);
    Vector<Complex> u(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
      u(v) = geometry::dist_to_set(mesh.vertices[v], crack) < 1e-12 ? Complex(0) : Complex(r(rng), r(rng));
    const auto e = zero_extend(mesh, u, crack, big);
    for (double p : {1.5, 2.0, 4.0}) EXPECT_NEAR(w1p_norm(big, e, p), w1p_norm(mesh, u, p), 1e-12 * w1p_norm(mesh, u, p));

    const Vector<Complex> zero = Vector<Complex>::Zero(u.size());
    EXPECT_EQ(zero_extend(mesh, zero, crack, big).norm(), 0.0);
    Vector<Complex> bad = u;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
      if (geometry::dist_to_set(mesh.vertices[v], crack) < 1e-12) bad(v) = 1.0;
    EXPECT_THROW(zero_extend(mesh, bad, crack, big), InvalidInput);
  }
  // a one-sided Dirichlet slit cannot be collapsed
  const auto mixed = scenes::mixed_slit_square();
  EXPECT_THROW(geometry::collapse_crack(mixed, geometry::SegmentSet(mixed.slit_edges())), InvalidInput);
}

TEST(DofMap, InterleavedComponents) {
  const auto mesh = build_mesh(scenes::unit_square({0}), 0.25);
  const DofMap dofs(mesh, {select::tagged(0), select::nowhere()});
  EXPECT_EQ(dofs.components(), 2);
  EXPECT_EQ(dofs.num_full(), 2 * mesh.num_vertices());
  EXPECT_EQ(dofs.num_constrained(1), 0u);
  EXPECT_GT(dofs.num_constrained(0), 0u);
  Vector<double> u = Vector<double>::LinSpaced(static_cast<Eigen::Index>(dofs.num_free()), 1, 2);
  EXPECT_EQ(dofs.restrict_free(dofs.expand(u)), u);
  for (std::size_t k = 0; k < dofs.num_free(); ++k) EXPECT_EQ(dofs.free_index(dofs.full_index(k) / 2, dofs.full_index(k) % 2), static_cast<int>(k));
}
