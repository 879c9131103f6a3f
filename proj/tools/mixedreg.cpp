#include "mixedreg/cli/config.hpp"
#include "mixedreg/core/errors.hpp"
#include "mixedreg/fem/assemble.hpp"
#include "mixedreg/fem/coefficient.hpp"
#include "mixedreg/fem/mesh_io.hpp"
#include "mixedreg/fem/mesher.hpp"
#include "mixedreg/geometry/ahlfors.hpp"
#include "mixedreg/geometry/jones.hpp"
#include "mixedreg/geometry/relative_volume.hpp"
#include "mixedreg/geometry/scene_io.hpp"
#include "mixedreg/lab/interpolation.hpp"
#include "mixedreg/lab/meyers.hpp"
#include "mixedreg/lab/resolvent.hpp"
#include "mixedreg/lab/semigroup.hpp"
#include "mixedreg/lab/sweep.hpp"
#include "mixedreg/solvers/direct.hpp"
#include "mixedreg/solvers/groeger.hpp"
#include "mixedreg/solvers/spectral.hpp"
#include "mixedreg/systems/cosserat.hpp"
#include "mixedreg/systems/elasticity.hpp"
#include "mixedreg/whitney/decomposition.hpp"
#include "mixedreg/whitney/extension.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace mixedreg::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Context {
  Config config;
  std::string experiment;
  std::string method;
  int threads = 1;
  std::uint64_t seed = 1;
  fs::path out;
  std::string stem;
  std::vector<fs::path> files;
  json summary = json::object();

  fs::path emit(const std::string& suffix, const std::string& content) {
    fs::create_directories(out);
    const fs::path p = out / (stem + "_" + suffix);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + p.string() + "'");
    f << content;
    files.push_back(p);
    return p;
  }

  void emit_table(const std::string& suffix, const lab::SweepResult& t) {
    t.validate();
    emit(suffix + ".csv", t.to_csv());
    emit(suffix + ".json", t.to_json().dump(2) + "\n");
  }
};

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalFailure("sha256: digest failed for '" + p.string() + "'");
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return s.str();
}

// ---- inputs

geometry::PlanarScene load_scene(const Config& c) {
  if (c.has("scene.path")) return geometry::read_scene(c.file("scene.path").string());
  const std::string name = c.text("scene.builtin", "");
  namespace sc = geometry::scenes;
  if (name == "unit_square") return sc::unit_square({0});
  if (name == "unit_square_neumann") return sc::unit_square();
  if (name == "slit_square") return sc::slit_square();
  if (name == "mixed_slit_square") return sc::mixed_slit_square();
  if (name == "l_shape") return sc::l_shape({0});
  if (name == "disc") return sc::disc();
  if (name == "cusp_domain") return sc::cusp_domain();
  if (name.empty()) throw InvalidInput("config: give scene.path or scene.builtin");
  throw InvalidInput("config: unknown builtin scene '" + name + "'");
}

Eigen::Matrix2cd parse_matrix(const std::vector<double>& v, const std::string& where) {
  Eigen::Matrix2cd m;
  if (v.size() == 1) return v[0] * Eigen::Matrix2cd::Identity();
  if (v.size() == 4) {
    m << v[0], v[1], v[2], v[3];
    return m;
  }
  if (v.size() == 8) {
    m << Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5]), Complex(v[6], v[7]);
    return m;
  }
  throw InvalidInput(where + ": expected 1, 4 or 8 numbers per coefficient");
}

lab::PointCoefficient checkerboard_on(const geometry::PlanarScene& scene, double contrast, int tiles) {
  require(contrast > 0.0 && tiles >= 1, "checkerboard: positive contrast and at least one tile required");
  const auto box = scene.bounding_box();
  return [box, contrast, tiles](const Point2& x) -> Eigen::Matrix2cd {
    const Point2 t = (x - box.lo).cwiseQuotient(box.hi - box.lo) * tiles;
    const int i = static_cast<int>(std::floor(t.x())), j = static_cast<int>(std::floor(t.y()));
    return (((i + j) % 2 != 0) ? contrast : 1.0) * Eigen::Matrix2cd::Identity();
  };
}

std::string coefficient_kind(const Config& c) {
  const std::string k = c.text("coefficient.kind", "constant");
  if (k != "constant" && k != "checkerboard" && k != "file")
    throw InvalidInput("config: coefficient.kind must be constant, checkerboard or file");
  return k;
}

std::vector<geometry::Segment> coefficient_interfaces(const Config& c, const geometry::PlanarScene& scene) {
  if (coefficient_kind(c) != "checkerboard") return {};
  const auto box = scene.bounding_box();
  return fem::tile_interfaces(c.integer("coefficient.tiles", 2), box.lo, box.hi);
}

/// Coefficient as a function of position (constant or checkerboard only).
lab::PointCoefficient point_coefficient(const Config& c, const geometry::PlanarScene& scene,
                                        std::optional<double> contrast = {}) {
  const std::string kind = coefficient_kind(c);
  if (kind == "checkerboard")
    return checkerboard_on(scene, contrast.value_or(c.number("coefficient.contrast")), c.integer("coefficient.tiles", 2));
  if (kind == "file") throw InvalidInput("config: per-cell coefficient files require a fixed mesh");
  const Eigen::Matrix2cd m = parse_matrix(c.numbers("coefficient.value", std::vector<double>{1.0}), "coefficient.value");
  return [m](const Point2&) { return m; };
}

fem::CoefficientField<2> cell_coefficient(const Config& c, const geometry::PlanarScene& scene, const fem::Mesh2& mesh) {
  if (coefficient_kind(c) != "file")
    return fem::coefficients::from_function<2>(mesh, point_coefficient(c, scene), coefficient_kind(c));
  const fs::path p = c.file("coefficient.file");
  std::ifstream in(p);
  std::vector<Eigen::Matrix2cd> cells;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream s(line);
    std::vector<double> v;
    double x;
    while (s >> x) v.push_back(x);
    if (!s.eof()) throw InvalidInput(p.string() + " line " + std::to_string(line_no) + ": non-numeric entry");
    if (v.empty()) continue;
    cells.push_back(parse_matrix(v, p.string() + " line " + std::to_string(line_no)));
  }
  if (cells.size() != mesh.num_cells())
    throw InvalidInput("coefficient file has " + std::to_string(cells.size()) + " cells, mesh has " +
                       std::to_string(mesh.num_cells()));
  return fem::CoefficientField<2>(std::move(cells), "file");
}

fem::Mesh2 scene_mesh(const Config& c, const geometry::PlanarScene& scene) {
  return fem::build_mesh(scene, c.number("scene.h_target", 0.1), coefficient_interfaces(c, scene));
}

json vec(const Point2& p) { return json::array({p.x(), p.y()}); }

// ---- experiments

void check_geometry(Context& ctx) {
  const Config& c = ctx.config;
  const auto scene = load_scene(c);
  const auto set = scene.dirichlet().empty() ? scene.boundary_set() : scene.dirichlet_set();
  std::vector<Point2> centers;
  for (const auto& s : set.segments())
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) centers.push_back(s.at(t));
  const auto radii = c.numbers("experiment.radii", std::vector<double>{0.5, 0.25, 0.125, 0.0625, 0.03125});
  const auto reg = geometry::ahlfors_regularity(set, centers, radii);

  geometry::JonesOptions jo;
  jo.seed = ctx.seed;
  const auto jones = geometry::jones_check(scene, c.number("experiment.delta", 0.25) * scene.diameter(),
                                           static_cast<std::size_t>(c.integer("experiment.pairs", 200)),
                                           static_cast<std::size_t>(c.integer("experiment.resolution", 64)), jo);

  auto r_grid = c.numbers("experiment.r_grid", std::vector<double>{0.4, 0.2, 0.1, 0.05, 0.025});
  for (double& r : r_grid) r *= scene.diameter();
  const auto vol = geometry::relative_volume(scene, set, r_grid);

  lab::SweepResult samples;
  samples.axis_name = "index";
  samples.columns = {"center_x", "center_y", "radius", "ratio"};
  for (std::size_t i = 0; i < reg.samples.size(); ++i) {
    const auto& s = reg.samples[i];
    samples.axis.push_back(static_cast<double>(i));
    samples.values.push_back({s.center.x(), s.center.y(), s.radius, s.ratio});
  }
  ctx.emit_table("ahlfors", samples);

  lab::SweepResult rv;
  rv.axis_name = "index";
  rv.columns = {"x", "y", "min_ratio"};
  for (std::size_t i = 0; i < vol.rows.size(); ++i) {
    rv.axis.push_back(static_cast<double>(i));
    rv.values.push_back({vol.rows[i].point.x(), vol.rows[i].point.y(), vol.rows[i].min_ratio});
  }
  ctx.emit_table("relative_volume", rv);

  json report;
  report["ahlfors"] = {{"l", reg.l}, {"c1_hat", reg.c1_hat}, {"c2_hat", reg.c2_hat}, {"samples", reg.samples.size()}};
  report["jones"] = {{"delta", jones.delta},
                     {"epsilon_hat", jones.feasible ? json(jones.epsilon_hat) : json(nullptr)},
                     {"feasible", jones.feasible},
                     {"pairs", jones.pairs},
                     {"disconnected_pairs", jones.disconnected_pairs},
                     {"worst_pair", {vec(jones.worst_pair.first), vec(jones.worst_pair.second)}}};
  report["relative_volume"] = {{"global_min", vol.global_min}, {"points", vol.rows.size()}};
  ctx.emit("report.json", report.dump(2) + "\n");
  ctx.summary = report;
}

void whitney_diagnostics(Context& ctx) {
  const Config& c = ctx.config;
  const auto scene = load_scene(c);
  const auto set = scene.dirichlet().empty() ? scene.boundary_set() : scene.dirichlet_set();
  const auto bb = scene.bounding_box();
  const double side = 1.5 * std::max(bb.hi.x() - bb.lo.x(), bb.hi.y() - bb.lo.y());
  const Point2 mid = bb.center();
  const geometry::Box root{mid - Point2(side / 2, side / 2), mid + Point2(side / 2, side / 2)};
  const auto w = whitney::decompose(set, root, c.integer("experiment.max_level", 12));

  std::size_t sandwich_failures = 0;
  for (const auto& q : w.cubes) {
    const double d = w.grid.distance(q);
    if (!(q.diam <= d && d <= 4.0 * q.diam)) ++sandwich_failures;
  }
  double ratio_lo = 1.0, ratio_hi = 1.0;
  for (const auto& [i, k] : w.adjacency) {
    const double r = w.cubes[i].side / w.cubes[k].side;
    ratio_lo = std::min(ratio_lo, r);
    ratio_hi = std::max(ratio_hi, r);
  }
  std::ostringstream cubes;
  whitney::write_csv(cubes, w);
  ctx.emit("cubes.csv", cubes.str());

  json report = {{"cubes", w.cubes.size()},
                 {"discarded", w.discarded},
                 {"uncovered_area", w.uncovered_area},
                 {"sandwich_failures", sandwich_failures},
                 {"touching_ratio_min", ratio_lo},
                 {"touching_ratio_max", ratio_hi}};

  if (c.flag("experiment.right_inverse", true)) {
    const double a = c.number("experiment.slope_x", 1.0), b = c.number("experiment.slope_y", -0.5);
    auto f = [a, b](const Point2& x) { return a * x.x() + b * x.y() + std::sin(x.x() + x.y()); };
    const auto e = whitney::extend(whitney::BoundaryFunction::from_callable(set, f), set, w);
    const auto r = whitney::restrict([&](const Point2& x) { return e(x); }, set);
    double err = 0.0;
    const auto nodes = whitney::boundary_nodes(set);
    for (std::size_t n = 0; n < nodes.size(); ++n) err = std::max(err, std::abs(r.trace.on_segment(nodes[n].segment, nodes[n].t) - f(nodes[n].point)));
    report["right_inverse_error"] = err;
    report["flagged_nodes"] = r.flagged.size();
  }
  ctx.emit("report.json", report.dump(2) + "\n");
  ctx.summary = report;
}

void solve(Context& ctx) {
  const Config& c = ctx.config;
  const auto scene = load_scene(c);
  const auto mesh = scene_mesh(c, scene);
  const auto mu = cell_coefficient(c, scene, mesh);
  fem::AssemblyOptions ao;
  ao.threads = ctx.threads;
  const auto op = fem::assemble(mesh, mu, c.number("experiment.shift", 1.0), fem::select::tagged(0), ao);
  const Complex rhs = c.number("experiment.rhs", 1.0);
  const auto f = fem::assemble_load<Complex, 2>(mesh, op.dofs, [rhs](const Point2&) { return rhs; });

  json report = {{"method", ctx.method}, {"dofs", op.size()}, {"cells", mesh.num_cells()}, {"h", mesh.h()}};
  Vector<Complex> u;
  if (ctx.method == "direct") {
    u = solvers::solve_direct(op.A, f);
    report["iterations"] = 0;
  } else {
    solvers::LanczosOptions lo;
    lo.seed = static_cast<unsigned>(ctx.seed);
    const auto est = solvers::estimate_coercivity(op, lo);
    if (!est.coercive) throw InvalidInput("solve: operator is not coercive (κ̂ ≤ 0)");
    solvers::GroegerOptions<Complex> go;
    go.tolerance = c.number("experiment.tolerance", 1e-10);
    auto [sol, rep] = solvers::groeger_solve(op, f, 0.99 * est.kappa_hat, 1.01 * est.m_hat, go);
    u = std::move(sol);
    const json details = rep.to_json();
    for (const auto& [k, v] : details.items()) report[k] = v;
  }
  const solvers::GramSolver<Complex> g(op.G);
  report["residual_dual"] = g.dual_norm(Vector<Complex>(op.A * u - f));
  report["solution_norm_G"] = g.norm(u);
  std::ostringstream csv;
  fem::write_solution_csv(csv, op.dofs.expand(u));
  ctx.emit("solution.csv", csv.str());
  ctx.emit("report.json", report.dump(2) + "\n");
  ctx.summary = report;
}

void meyers(Context& ctx) {
  const Config& c = ctx.config;
  const auto scene = load_scene(c);
  lab::MeyersOptions o;
  o.p_grid = c.numbers("experiment.p_grid", o.p_grid);
  o.h0 = c.number("scene.h_target", o.h0);
  o.levels = c.integer("experiment.levels", o.levels);
  o.threshold = c.number("experiment.threshold", o.threshold);
  o.interfaces = coefficient_interfaces(c, scene);
  const bool checker = coefficient_kind(c) == "checkerboard";
  const std::string forcing = c.text("experiment.forcing", checker ? "tiles" : "uniform");
  if (forcing == "tiles") {
    // opposite unit sources on the two high-contrast tiles
    const auto box = scene.bounding_box();
    o.rhs = [box](const Point2& p) {
      const Point2 t = (p - box.lo).cwiseQuotient(box.hi - box.lo);
      const bool right = t.x() > 0.5, top = t.y() > 0.5;
      return Complex(right && !top ? 1.0 : (!right && top ? -1.0 : 0.0));
    };
  } else if (forcing != "uniform") {
    throw InvalidInput("config: experiment.forcing must be uniform or tiles");
  }

  std::vector<double> contrasts{0.0};
  if (checker) contrasts = c.numbers("experiment.contrasts", std::vector<double>{c.number("coefficient.contrast")});
  const auto results = lab::parallel_map<lab::MeyersResult>(
      contrasts.size(),
      [&](std::size_t i) {
        lab::MeyersOptions oi = o;
        std::ostringstream id;
        if (checker) id << "checkerboard" << contrasts[i];
        else id << "constant";
        oi.coefficient_id = id.str();
        return lab::meyers_sweep(scene, checker ? point_coefficient(c, scene, contrasts[i]) : point_coefficient(c, scene), oi);
      },
      ctx.threads);

  lab::SweepResult summary;
  summary.axis_name = checker ? "contrast" : "index";
  summary.columns = {"p_crit"};
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::ostringstream suffix;
    suffix << "table_" << i;
    ctx.emit_table(suffix.str(), results[i].table);
    summary.axis.push_back(checker ? contrasts[i] : static_cast<double>(i));
    summary.values.push_back({results[i].p_crit});
  }
  if (checker) {
    for (std::size_t i = 1; i < contrasts.size(); ++i)
      require(contrasts[i] > contrasts[i - 1], "config: experiment.contrasts must be increasing");
  }
  ctx.emit_table("p_crit", summary);
  ctx.summary = summary.to_json();
}

void resolvent(Context& ctx) {
  const Config& c = ctx.config;
  const auto scene = load_scene(c);
  const auto mesh = scene_mesh(c, scene);
  const auto op = fem::assemble(mesh, cell_coefficient(c, scene, mesh), c.number("experiment.shift", 1.0));
  const auto grid = c.has("experiment.lambdas")
                        ? c.complex_numbers("experiment.lambdas")
                        : lab::ray_grid(c.numbers("experiment.moduli", std::vector<double>{1, 10, 100, 1e3, 1e4}));
  const auto r = lab::resolvent_sweep(op, grid, ctx.threads);
  ctx.emit_table("resolvent", r.table);
  ctx.summary = {{"points", grid.size()}, {"sup_scaled", r.sup_scaled}, {"dofs", op.size()}};
}

void semigroup(Context& ctx) {
  const Config& c = ctx.config;
  const auto scene = load_scene(c);
  const auto mesh = scene_mesh(c, scene);
  const auto op = fem::assemble(mesh, cell_coefficient(c, scene, mesh), c.number("experiment.shift", 1.0));
  const auto times = c.numbers("experiment.times", std::vector<double>{0.01, 0.1, 1.0});
  const auto qs = c.numbers("experiment.qs", std::vector<double>{2.0, 4.0});
  const int factors = c.integer("experiment.factors", 10);
  const auto reports = lab::parallel_map<lab::SemigroupReport>(
      times.size(), [&](std::size_t i) { return lab::semigroup_kernel(mesh, op, times[i], qs, factors); }, ctx.threads);
  lab::SweepResult t;
  t.axis_name = "t";
  t.columns = {"semigroup_error", "reconstruction_error", "nuclear_norm"};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    t.axis.push_back(times[i]);
    t.values.push_back({reports[i].semigroup_error, reports[i].reconstruction_error, reports[i].nuclear_norm});
    ctx.emit_table("factors_" + std::to_string(i), reports[i].factors);
  }
  ctx.emit_table("semigroup", t);
  ctx.summary = t.to_json();
}

double asymmetry(const SparseMatrix<double>& a) {
  return SparseMatrix<double>(a - SparseMatrix<double>(a.transpose())).cwiseAbs().sum() /
         std::max(a.cwiseAbs().sum(), 1e-300);
}

json solve_system(Context& ctx, const fem::DiscreteOperator<double>& op, int components, const std::vector<double>& load) {
  Vector<double> full = Vector<double>::Zero(static_cast<Eigen::Index>(op.dofs.num_full()));
  for (Eigen::Index k = 0; k < full.size(); ++k) full(k) = load[static_cast<std::size_t>(k % components)];
  const Vector<double> f = op.mass * op.dofs.restrict_free(full);
  solvers::LanczosOptions lo;
  lo.seed = static_cast<unsigned>(ctx.seed);
  const auto est = solvers::estimate_coercivity(op, lo);
  json r = {{"asymmetry", asymmetry(op.A)}, {"kappa_hat", est.kappa_hat}, {"M_hat", est.m_hat}, {"dofs", op.size()}};
  Vector<double> u;
  if (ctx.method == "direct") {
    u = solvers::solve_direct(op.A, f);
    r["iterations"] = 0;
  } else {
    if (!est.coercive) throw InvalidInput("groeger: operator is not coercive (κ̂ ≤ 0)");
    auto [sol, rep] = solvers::groeger_solve(op, f, est.kappa_hat, est.m_hat);
    u = std::move(sol);
    const json details = rep.to_json();
    for (const auto& [k, v] : details.items())
      if (k != "residual_history") r[k] = v;
  }
  std::ostringstream csv;
  fem::write_solution_csv(csv, op.dofs.expand(u), components);
  ctx.emit("solution.csv", csv.str());
  return r;
}

void elasticity(Context& ctx) {
  const Config& c = ctx.config;
  const auto scene = load_scene(c);
  const auto mesh = fem::build_mesh(scene, c.number("scene.h_target", 0.1));
  const systems::ElasticityTensor t{c.number("experiment.lame_lambda", 1.0), c.number("experiment.lame_mu", 1.0)};
  t.validate(2);
  const auto masks = systems::same_mask(fem::select::tagged(0), 2);
  fem::AssemblyOptions ao;
  ao.threads = ctx.threads;
  const auto op = systems::assemble_elasticity(mesh, t, masks, ao);
  auto r = solve_system(ctx, op, 2, c.numbers("experiment.load", std::vector<double>{0.0, -1.0}));
  r["legendre_hadamard"] = systems::legendre_hadamard(systems::elasticity_coefficient(t, 2, 1));
  r["coercivity_bound"] = t.coercivity(2);
  if (c.flag("experiment.korn", true)) {
    const auto k = systems::korn_constants(mesh, masks);
    r["korn2"] = k.korn2;
    if (k.has_korn1) r["korn1"] = k.korn1;
  }
  ctx.emit("report.json", r.dump(2) + "\n");
  ctx.summary = r;
}

std::vector<int> label_list(const Config& c, const std::string& key, int fallback) {
  std::vector<int> out;
  for (double x : c.numbers(key, std::vector<double>{static_cast<double>(fallback)})) {
    if (x != std::floor(x) || x < 0 || x > 5) throw InvalidInput("config: '" + key + "' lists cube faces 0..5");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

void cosserat(Context& ctx) {
  const Config& c = ctx.config;
  const systems::CosseratParams p{c.number("experiment.mu", 1.0), c.number("experiment.lambda", 1.0),
                                  c.number("experiment.mu_c", 0.0), c.number("experiment.gamma", 1.0)};
  p.validate();
  const auto mesh = fem::unit_cube_mesh(c.integer("experiment.cube_n", 3));
  fem::AssemblyOptions ao;
  ao.threads = ctx.threads;
  const auto op = systems::assemble_cosserat(mesh, p, fem::select::labels(label_list(c, "experiment.u_faces", 0)),
                                             fem::select::labels(label_list(c, "experiment.r_faces", 1)), ao);
  auto r = solve_system(ctx, op, 6, c.numbers("experiment.load", std::vector<double>{1.0, 1.1, 1.2, 1.3, 1.4, 1.5}));
  r["legendre_hadamard"] = systems::legendre_hadamard(systems::cosserat_coefficient(p, 1));
  ctx.emit("report.json", r.dump(2) + "\n");
  ctx.summary = r;
}

void interpolation_suite(Context& ctx) {
  const Config& c = ctx.config;
  const auto scene = load_scene(c);
  const auto mesh = fem::build_mesh(scene, c.number("scene.h_target", 0.1));
  auto ex = c.numbers("experiment.exponents", std::vector<double>{1.5, 2, 3, 4, 6});
  std::sort(ex.begin(), ex.end());
  const int count = c.integer("experiment.functions", 100);
  require(count >= 1, "config: experiment.functions must be positive");
  std::mt19937_64 rng(ctx.seed);
  std::normal_distribution<double> g;
  std::vector<Vector<Complex>> us;
  for (int k = 0; k < count; ++k) {
    Vector<Complex> u(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double re = g(rng);
      u(i) = Complex(re, g(rng));
    }
    us.push_back(std::move(u));
  }
  lab::SweepResult t;
  t.axis_name = "triple";
  t.columns = {"p0", "p", "p1", "theta", "max_ratio", "passed"};
  std::size_t failures = 0, idx = 0;
  for (std::size_t a = 0; a < ex.size(); ++a)
    for (std::size_t b = a + 1; b < ex.size(); ++b)
      for (std::size_t d = b + 1; d < ex.size(); ++d) {
        const double theta = (1.0 / ex[a] - 1.0 / ex[b]) / (1.0 / ex[a] - 1.0 / ex[d]);
        double worst = 0.0;
        int passed = 0;
        for (const auto& u : us) {
          const auto r = lab::interpolation_check(mesh, u, ex[a], ex[d], theta);
          worst = std::max(worst, r.lhs / r.rhs);
          passed += r.pass ? 1 : 0;
        }
        failures += static_cast<std::size_t>(count - passed);
        t.axis.push_back(static_cast<double>(idx++));
        t.values.push_back({ex[a], ex[b], ex[d], theta, worst, static_cast<double>(passed)});
      }
  ctx.emit_table("interpolation", t);
  ctx.summary = {{"triples", idx}, {"functions", count}, {"failures", failures}};
}

const std::map<std::string, std::function<void(Context&)>>& experiments() {
  static const std::map<std::string, std::function<void(Context&)>> table{
      {"check-geometry", check_geometry}, {"whitney", whitney_diagnostics},  {"solve", solve},
      {"meyers-sweep", meyers},           {"resolvent-sweep", resolvent},   {"semigroup", semigroup},
      {"elasticity", elasticity},         {"cosserat", cosserat},           {"interpolation-suite", interpolation_suite}};
  return table;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y%m%dT%H%M%S");
  return s.str();
}

std::string scene_label(const Config& c, const std::string& experiment) {
  if (experiment == "cosserat") return "unit_cube";
  if (c.has("scene.path")) {
    std::string stem = fs::path(c.text("scene.path")).filename().string();
    return stem.substr(0, stem.find('.'));
  }
  return c.text("scene.builtin", "scene");
}

int run(const std::string& experiment, const std::string& config_path, const std::vector<std::string>& overrides,
        const std::string& method_flag, int threads) {
  const auto it = experiments().find(experiment);
  if (it == experiments().end()) {
    std::cerr << "unknown experiment '" << experiment << "'; expected one of:";
    for (const auto& [name, fn] : experiments()) std::cerr << ' ' << name;
    std::cerr << '\n';
    return 2;
  }
  Context ctx;
  ctx.config = config_path.empty() ? Config() : Config::load(config_path);
  for (const auto& o : overrides) ctx.config.set(o);
  if (ctx.config.has("run.experiment") && ctx.config.text("run.experiment") != experiment)
    throw InvalidInput("config: run.experiment is '" + ctx.config.text("run.experiment") + "' but '" + experiment +
                       "' was requested");
  ctx.experiment = experiment;
  ctx.method = method_flag.empty() ? ctx.config.text("experiment.method", "direct") : method_flag;
  if (ctx.method != "direct" && ctx.method != "groeger") throw InvalidInput("--method must be direct or groeger");
  const double seed = ctx.config.number("run.seed", 1.0);
  if (seed < 0 || seed != std::floor(seed)) throw InvalidInput("config: run.seed must be a nonnegative integer");
  ctx.seed = static_cast<std::uint64_t>(seed);
  ctx.threads = threads;
  if (const char* env = std::getenv("MIXEDREG_OUT"); env && *env) ctx.out = env;
  else ctx.out = ctx.config.text("run.output", "mixedreg_out");
  const std::string timestamp = ctx.config.text("run.timestamp", utc_timestamp());
  ctx.stem = scene_label(ctx.config, experiment) + "_" + experiment + "_" + timestamp;

  it->second(ctx);

  json manifest;
  manifest["version"] = MIXEDREG_VERSION;
  manifest["experiment"] = experiment;
  manifest["method"] = ctx.method;
  manifest["seed"] = ctx.seed;
  manifest["threads"] = ctx.threads;
  manifest["timestamp"] = timestamp;
  manifest["config"] = ctx.config.to_json();
  manifest["summary"] = ctx.summary;
  json files = json::array();
  for (const auto& f : ctx.files)
    files.push_back({{"file", f.filename().string()}, {"bytes", fs::file_size(f)}, {"sha256", sha256_file(f)}});
  manifest["files"] = files;
  const fs::path mpath = ctx.out / (ctx.stem + "_manifest.json");
  std::ofstream(mpath) << manifest.dump(2) << '\n';
  std::cout << ctx.summary.dump(2) << '\n' << "manifest: " << mpath.string() << '\n';
  return 0;
}

}  // namespace mixedreg::cli

int main(int argc, char** argv) {
  CLI::App app{"mixedreg: batch experiments for elliptic problems with mixed boundary conditions"};
  app.require_subcommand(1);
  std::string experiment, config, method;
  std::vector<std::string> overrides;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("experiment", experiment,
                  "check-geometry | whitney | solve | meyers-sweep | resolvent-sweep | semigroup | elasticity | "
                  "cosserat | interpolation-suite")
      ->required();
  run->add_option("-c,--config", config, "INI experiment config");
  run->add_option("--set", overrides, "override a config key: section.key=value");
  run->add_option("--method", method, "direct | groeger (solve, elasticity, cosserat)");
  run->add_option("--threads", threads, "worker threads; 1 gives deterministic output")->check(CLI::PositiveNumber);
  auto* list = app.add_subcommand("list", "print the experiment names");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*list) {
    for (const auto& [name, fn] : mixedreg::cli::experiments()) std::cout << name << '\n';
    return 0;
  }
  try {
    return mixedreg::cli::run(experiment, config, overrides, method, threads);
  } catch (const mixedreg::InvalidInput& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
}
