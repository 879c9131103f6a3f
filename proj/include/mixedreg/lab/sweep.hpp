#pragma once

#include "mixedreg/core/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace mixedreg::lab {

/// Table of measured quantities, one row per axis point.
struct SweepResult {
  std::string axis_name = "axis";
  std::vector<double> axis;
  std::vector<std::string> columns;
  /// values[row][column]
  std::vector<std::vector<double>> values;
  std::map<std::string, std::string> metadata;

  void validate() const {
    require(values.size() == axis.size(), "SweepResult: one row per axis point expected");
    for (std::size_t i = 1; i < axis.size(); ++i)
      require(axis[i] > axis[i - 1], "SweepResult: axis must be strictly increasing");
    for (const auto& row : values) {
      require(row.size() == columns.size(), "SweepResult: row width differs from the column count");
      for (double v : row) require(std::isfinite(v), "SweepResult: non-finite value");
    }
  }

  std::size_t column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    require(it != columns.end(), "SweepResult: no column " + name);
    return static_cast<std::size_t>(it - columns.begin());
  }

  std::string to_csv() const {
    std::ostringstream s;
    s << std::setprecision(17) << axis_name;
    for (const auto& c : columns) s << ',' << c;
    s << '\n';
    for (std::size_t i = 0; i < axis.size(); ++i) {
      s << axis[i];
      for (double v : values[i]) s << ',' << v;
      s << '\n';
    }
    return s.str();
  }

  nlohmann::json to_json() const {
    return {{"axis_name", axis_name}, {"axis", axis}, {"columns", columns}, {"values", values}, {"metadata", metadata}};
  }

  /// Writes `<scene>_<experiment>_<timestamp>.csv` and `.json`; returns both paths.
  std::vector<std::filesystem::path> write(const std::filesystem::path& dir, const std::string& scene,
                                           const std::string& experiment, const std::string& timestamp) const {
    std::filesystem::create_directories(dir);
    const std::string stem = scene + "_" + experiment + "_" + timestamp;
    const auto csv = dir / (stem + ".csv");
    const auto json = dir / (stem + ".json");
    std::ofstream(csv) << to_csv();
    std::ofstream(json) << to_json().dump(2) << '\n';
    return {csv, json};
  }
};

/// Evaluates job(i) for i < n on up to `threads` workers; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& job, int threads = 1) {
  std::vector<T> out(n);
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = job(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace mixedreg::lab
