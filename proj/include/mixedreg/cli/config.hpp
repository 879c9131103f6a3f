#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/core/types.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mixedreg::cli {

/// INI text: `[section]` headers followed by `key = value` lines. Keys are
/// addressed as "section.key"; relative file paths resolve against the
/// directory of the config file.
class Config {
 public:
  Config() = default;

  static Config parse(std::istream& in, std::filesystem::path base = ".") {
    Config c;
    c.base_ = std::move(base);
    try {
      boost::property_tree::ini_parser::read_ini(in, c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw InvalidInput("config: " + std::string(e.what()));
    }
    for (const auto& [section, body] : c.tree_)
      if (body.empty() && !body.data().empty())
        throw InvalidInput("config: key '" + section + "' outside any [section]");
    return c;
  }

  static Config load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open '" + path.string() + "'");
    return parse(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  }

  /// Override from "section.key=value".
  void set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 || dot + 1 == eq)
      throw InvalidInput("config: override '" + assignment + "' is not of the form section.key=value");
    tree_.put(boost::property_tree::ptree::path_type(assignment.substr(0, eq), '.'), trim(assignment.substr(eq + 1)));
  }

  bool has(const std::string& key) const { return raw(key).has_value(); }

  std::string text(const std::string& key, const std::string& fallback) const { return raw(key).value_or(fallback); }

  std::string text(const std::string& key) const {
    if (auto v = raw(key)) return *v;
    throw InvalidInput("config: missing key '" + key + "'");
  }

  double number(const std::string& key, std::optional<double> fallback = {}) const {
    const auto v = raw(key);
    if (!v) {
      if (fallback) return *fallback;
      throw InvalidInput("config: missing key '" + key + "'");
    }
    return to_number(key, *v);
  }

  int integer(const std::string& key, std::optional<int> fallback = {}) const {
    const double x = number(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw InvalidInput("config: '" + key + "' must be an integer");
    return static_cast<int>(x);
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw InvalidInput("config: '" + key + "' must be true or false");
  }

  /// Comma-separated list of numbers; must be nonempty.
  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = {}) const {
    const auto v = raw(key);
    if (!v) {
      if (fallback) return *fallback;
      throw InvalidInput("config: missing key '" + key + "'");
    }
    std::vector<double> out;
    for (const auto& item : split(*v, ',')) out.push_back(to_number(key, item));
    if (out.empty()) throw InvalidInput("config: '" + key + "' is an empty list");
    return out;
  }

  /// Comma-separated complex numbers written "re" or "re:im".
  std::vector<Complex> complex_numbers(const std::string& key) const {
    std::vector<Complex> out;
    for (const auto& item : split(text(key), ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) out.emplace_back(to_number(key, item), 0.0);
      else out.emplace_back(to_number(key, item.substr(0, colon)), to_number(key, item.substr(colon + 1)));
    }
    if (out.empty()) throw InvalidInput("config: '" + key + "' is an empty list");
    return out;
  }

  /// A path that must name an existing file.
  std::filesystem::path file(const std::string& key) const {
    std::filesystem::path p = text(key);
    if (p.is_relative()) p = base_ / p;
    if (!std::filesystem::is_regular_file(p))
      throw InvalidInput("config: '" + key + "' refers to a missing file '" + p.string() + "'");
    return p;
  }

  /// {section: {key: value}} in file order.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [section, body] : tree_) {
      nlohmann::ordered_json s = nlohmann::ordered_json::object();
      for (const auto& [key, value] : body) s[key] = value.data();
      j[section] = s;
    }
    return j;
  }

 private:
  std::optional<std::string> raw(const std::string& key) const {
    if (auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'))) return trim(*v);
    return std::nullopt;
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
      if (!trim(item).empty()) out.push_back(trim(item));
    return out;
  }

  static double to_number(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(trim(s), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != trim(s).size() || !std::isfinite(x))
      throw InvalidInput("config: '" + key + "' has non-numeric value '" + s + "'");
    return x;
  }

  boost::property_tree::ptree tree_;
  std::filesystem::path base_ = ".";
};

}  // namespace mixedreg::cli
