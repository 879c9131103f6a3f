#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"
#include "mixedreg/fem/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mixedreg::fem {

// Plain-text mesh format:
//   DIMENSION d
//   NODES n        then n lines "id x y [z]"
//   CELLS m        then m lines "id v1 .. v(d+1)"
//   BOUNDARY k     then k lines "v1 .. vd dirichlet_mask label"
// '#' starts a comment. Ids are zero based and must be consecutive.

template <int Dim>
void write_mesh(std::ostream& out, const Mesh<Dim>& mesh) {
  out << std::setprecision(17);
  out << "DIMENSION " << Dim << "\n";
  out << "NODES " << mesh.num_vertices() << "\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    out << v;
    for (int k = 0; k < Dim; ++k) out << ' ' << mesh.vertices[v][k];
    out << "\n";
  }
  out << "CELLS " << mesh.num_cells() << "\n";
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    out << c;
    for (int v : mesh.cells[c]) out << ' ' << v;
    out << "\n";
  }
  out << "BOUNDARY " << mesh.boundary.size() << "\n";
  for (const auto& f : mesh.boundary) {
    for (int v : f.vertices) out << v << ' ';
    out << f.dirichlet << ' ' << f.label << "\n";
  }
}

template <int Dim>
Mesh<Dim> read_mesh(std::istream& in) {
  Mesh<Dim> mesh;
  int line_no = 0;
  std::string line;
  auto next = [&](std::istringstream& ls) {
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ls = std::istringstream(line);
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) { return InvalidInput("mesh line " + std::to_string(line_no) + ": " + what); };
  auto header = [&](const char* name) {
    std::istringstream ls;
    if (!next(ls)) throw fail(std::string("missing ") + name);
    std::string word;
    long long n = -1;
    if (!(ls >> word >> n) || word != name || n < 0) throw fail(std::string("expected '") + name + " <count>'");
    return static_cast<std::size_t>(n);
  };
  if (header("DIMENSION") != static_cast<std::size_t>(Dim)) throw fail("dimension mismatch");
  const std::size_t nv = header("NODES");
  for (std::size_t i = 0; i < nv; ++i) {
    std::istringstream ls;
    if (!next(ls)) throw fail("truncated NODES section");
    std::size_t id;
    typename Mesh<Dim>::Point x;
    if (!(ls >> id) || id != i) throw fail("node ids must be consecutive from 0");
    for (int k = 0; k < Dim; ++k)
      if (!(ls >> x[k])) throw fail("bad node coordinates");
    mesh.vertices.push_back(x);
  }
  const std::size_t nc = header("CELLS");
  for (std::size_t i = 0; i < nc; ++i) {
    std::istringstream ls;
    if (!next(ls)) throw fail("truncated CELLS section");
    std::size_t id;
    typename Mesh<Dim>::Cell cell;
    if (!(ls >> id) || id != i) throw fail("cell ids must be consecutive from 0");
    for (int& v : cell)
      if (!(ls >> v) || v < 0 || static_cast<std::size_t>(v) >= nv) throw fail("bad cell vertex");
    mesh.cells.push_back(cell);
  }
  std::map<std::vector<int>, int> owner;
  for (std::size_t c = 0; c < nc; ++c)
    for (int skip = 0; skip <= Dim; ++skip) {
      std::vector<int> f;
      for (int a = 0; a <= Dim; ++a)
        if (a != skip) f.push_back(mesh.cells[c][a]);
      std::sort(f.begin(), f.end());
      owner[f] = static_cast<int>(c);
    }
  const std::size_t nb = header("BOUNDARY");
  for (std::size_t i = 0; i < nb; ++i) {
    std::istringstream ls;
    if (!next(ls)) throw fail("truncated BOUNDARY section");
    BoundaryFacet f;
    f.vertices.resize(Dim);
    for (int& v : f.vertices)
      if (!(ls >> v) || v < 0 || static_cast<std::size_t>(v) >= nv) throw fail("bad facet vertex");
    if (!(ls >> f.dirichlet >> f.label)) throw fail("expected '<dirichlet mask> <label>' after facet vertices");
    auto key = f.vertices;
    std::sort(key.begin(), key.end());
    auto it = owner.find(key);
    if (it == owner.end()) throw fail("facet is not a face of any cell");
    f.cell = it->second;
    mesh.boundary.push_back(std::move(f));
  }
  mesh.validate();
  return mesh;
}

template <int Dim>
void save_mesh(const std::string& path, const Mesh<Dim>& mesh) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  write_mesh(out, mesh);
}

template <int Dim>
Mesh<Dim> load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  return read_mesh<Dim>(in);
}

/// CSV "vertex,value" (real) or "vertex,re,im" (complex); m-component
/// vectors in interleaved order get one column per component.
template <class S>
void write_solution_csv(std::ostream& out, const Vector<S>& u, int components = 1) {
  require(components >= 1 && u.size() % components == 0, "write_solution_csv: size is not a multiple of components");
  out << std::setprecision(17) << "vertex";
  for (int k = 0; k < components; ++k) {
    const std::string suffix = components > 1 ? std::to_string(k) : "";
    if constexpr (is_complex_v<S>) out << ",re" << suffix << ",im" << suffix;
    else out << ",value" << suffix;
  }
  out << "\n";
  for (Eigen::Index v = 0; v < u.size() / components; ++v) {
    out << v;
    for (int k = 0; k < components; ++k) {
      const S x = u(v * components + k);
      if constexpr (is_complex_v<S>) out << ',' << x.real() << ',' << x.imag();
      else out << ',' << x;
    }
    out << "\n";
  }
}

}  // namespace mixedreg::fem
