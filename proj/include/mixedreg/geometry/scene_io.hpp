#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/geometry/scene.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

namespace mixedreg::geometry {

// Scene file layout (one record per line, '#' starts a comment):
//
//   NAME <name>                      optional
//   VERTICES
//   <id> <x> <y>
//   LOOPS
//   outer <id> <id> ...              exactly one outer loop
//   hole <id> <id> ...
//   SLITS
//   <id> <id> ...                    open polyline
//   DIRICHLET
//   <id> <id> [both|left|right]      segment on a loop edge or slit

inline PlanarScene parse_scene(std::istream& in, const std::string& fallback_name = "scene") {
  enum class Section { none, vertices, loops, slits, dirichlet } section = Section::none;
  std::string name = fallback_name;
  std::map<long, Point2> vertices;
  std::vector<Point2> outer;
  std::vector<std::vector<Point2>> holes, slits;
  std::vector<DirichletPiece> dirichlet;

  auto vertex = [&](long id, int line) {
    auto it = vertices.find(id);
    if (it == vertices.end())
      throw InvalidInput("scene line " + std::to_string(line) + ": unknown vertex id " + std::to_string(id));
    return it->second;
  };

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string head;
    if (!(line >> head)) continue;
    if (head == "NAME") {
      line >> name;
      continue;
    }
    if (head == "VERTICES") { section = Section::vertices; continue; }
    if (head == "LOOPS") { section = Section::loops; continue; }
    if (head == "SLITS") { section = Section::slits; continue; }
    if (head == "DIRICHLET") { section = Section::dirichlet; continue; }

    const std::string where = "scene line " + std::to_string(line_no);
    switch (section) {
      case Section::none:
        throw InvalidInput(where + ": record before any section header");
      case Section::vertices: {
        long id;
        double x, y;
        std::istringstream rec(raw);
        if (!(rec >> id >> x >> y)) throw InvalidInput(where + ": expected '<id> <x> <y>'");
        if (!vertices.emplace(id, Point2(x, y)).second) throw InvalidInput(where + ": duplicate vertex id");
        break;
      }
      case Section::loops: {
        std::vector<Point2> loop;
        long id;
        while (line >> id) loop.push_back(vertex(id, line_no));
        if (!line.eof()) throw InvalidInput(where + ": malformed loop record");
        if (head == "outer") {
          if (!outer.empty()) throw InvalidInput(where + ": second outer loop");
          outer = std::move(loop);
        } else if (head == "hole") {
          holes.push_back(std::move(loop));
        } else {
          throw InvalidInput(where + ": loop kind must be 'outer' or 'hole'");
        }
        break;
      }
      case Section::slits: {
        std::istringstream rec(raw);
        std::vector<Point2> slit;
        long id;
        while (rec >> id) slit.push_back(vertex(id, line_no));
        if (!rec.eof()) throw InvalidInput(where + ": malformed slit record");
        slits.push_back(std::move(slit));
        break;
      }
      case Section::dirichlet: {
        std::istringstream rec(raw);
        long a, b;
        if (!(rec >> a >> b)) throw InvalidInput(where + ": expected '<id> <id> [side]'");
        std::string side = "both";
        rec >> side;
        Side s = Side::both;
        if (side == "left") s = Side::left;
        else if (side == "right") s = Side::right;
        else if (side != "both") throw InvalidInput(where + ": side must be both, left or right");
        dirichlet.push_back({{vertex(a, line_no), vertex(b, line_no)}, s});
        break;
      }
    }
  }
  if (outer.empty()) throw InvalidInput("scene: missing outer loop");
  return PlanarScene(name, std::move(outer), std::move(holes), std::move(slits), std::move(dirichlet));
}

inline PlanarScene read_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scene file '" + path + "'");
  std::string stem = path.substr(path.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find('.'));
  return parse_scene(in, stem);
}

inline void write_scene(std::ostream& out, const PlanarScene& scene) {
  out << std::setprecision(17);
  out << "NAME " << scene.name() << "\nVERTICES\n";
  long next = 0;
  auto emit = [&](const std::vector<Point2>& pts) {
    std::vector<long> ids;
    for (const Point2& p : pts) {
      out << next << ' ' << p.x() << ' ' << p.y() << '\n';
      ids.push_back(next++);
    }
    return ids;
  };
  const auto outer = emit(scene.outer());
  std::vector<std::vector<long>> holes, slits;
  for (const auto& h : scene.holes()) holes.push_back(emit(h));
  for (const auto& s : scene.slits()) slits.push_back(emit(s));
  std::vector<std::pair<long, long>> dir;
  for (const auto& d : scene.dirichlet()) {
    const auto ids = emit({d.segment.a, d.segment.b});
    dir.emplace_back(ids[0], ids[1]);
  }
  out << "LOOPS\nouter";
  for (long id : outer) out << ' ' << id;
  out << '\n';
  for (const auto& h : holes) {
    out << "hole";
    for (long id : h) out << ' ' << id;
    out << '\n';
  }
  out << "SLITS\n";
  for (const auto& s : slits) {
    for (std::size_t k = 0; k < s.size(); ++k) out << (k ? " " : "") << s[k];
    out << '\n';
  }
  out << "DIRICHLET\n";
  for (std::size_t k = 0; k < dir.size(); ++k) {
    const Side side = scene.dirichlet()[k].side;
    out << dir[k].first << ' ' << dir[k].second << ' '
        << (side == Side::both ? "both" : side == Side::left ? "left" : "right") << '\n';
  }
}

}  // namespace mixedreg::geometry
