#include "weylkit/config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "weylkit/errors.hpp"

namespace weylkit {

namespace {

const std::map<std::string, Suite>& suite_names() {
  static const std::map<std::string, Suite> names = {
      {"plancherel", Suite::plancherel},     {"ortho", Suite::ortho},
      {"intertwine", Suite::intertwine},     {"product-law", Suite::product_law},
      {"symplectic", Suite::symplectic},     {"inversion", Suite::inversion},
      {"rank-profile", Suite::rank_profile}, {"kernel-support", Suite::kernel_support},
      {"pocs", Suite::pocs},                 {"all", Suite::all}};
  return names;
}

const std::map<std::string, Group>& group_names() {
  static const std::map<std::string, Group> names = {
      {"heisenberg", Group::heisenberg}, {"motion", Group::motion}, {"step2", Group::step2}};
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(int line, const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out))
    fail(line, key + ": expected a finite real, got '" + v + "'");
  return out;
}

long long to_int(int line, const std::string& key, const std::string& v) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    fail(line, key + ": expected an integer, got '" + v + "'");
  return out;
}

int ranged(int line, const std::string& key, const std::string& v, long long lo, long long hi) {
  const long long x = to_int(line, key, v);
  if (x < lo || x > hi)
    fail(line, key + " = " + v + " is out of range [" + std::to_string(lo) + ", " +
                   std::to_string(hi) + "]");
  return static_cast<int>(x);
}

}  // namespace

std::string to_string(Suite s) {
  for (const auto& [name, v] : suite_names())
    if (v == s) return name;
  return "?";
}

std::string to_string(Group g) {
  for (const auto& [name, v] : group_names())
    if (v == g) return name;
  return "?";
}

const std::vector<Suite>& concrete_suites() {
  static const std::vector<Suite> all = {
      Suite::plancherel, Suite::ortho,        Suite::intertwine,     Suite::product_law,
      Suite::symplectic, Suite::inversion,    Suite::rank_profile,   Suite::kernel_support,
      Suite::pocs};
  return all;
}

std::vector<Group> suite_groups(Suite s) {
  switch (s) {
    case Suite::plancherel:
    case Suite::ortho:
      return {Group::heisenberg, Group::motion, Group::step2};
    case Suite::intertwine:
      return {Group::motion};
    case Suite::product_law:
      return {Group::heisenberg, Group::motion};
    case Suite::symplectic:
    case Suite::inversion:
      return {Group::step2};
    case Suite::rank_profile:
    case Suite::kernel_support:
    case Suite::pocs:
      return {Group::heisenberg};
    case Suite::all:
      return {Group::heisenberg, Group::motion, Group::step2};
  }
  return {};
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string v = trim(body.substr(eq + 1));
    if (key.empty()) fail(line, "missing key");
    if (v.empty()) fail(line, key + ": missing value");
    if (!seen.insert(key).second) fail(line, "duplicate key '" + key + "'");

    if (key == "suite") {
      const auto it = suite_names().find(v);
      if (it == suite_names().end()) fail(line, "unknown suite '" + v + "'");
      cfg.suite = it->second;
    } else if (key == "group") {
      const auto it = group_names().find(v);
      if (it == group_names().end()) fail(line, "unknown group '" + v + "'");
      cfg.group = it->second;
    } else if (key == "n") {
      cfg.n = ranged(line, key, v, 1, 2);
    } else if (key == "lambda") {
      cfg.lambda = to_double(line, key, v);
      if (cfg.lambda == 0.0) fail(line, "lambda must be a nonzero real");
    } else if (key == "degree_cap") {
      cfg.degree_cap = ranged(line, key, v, 1, 64);
    } else if (key == "quad_size") {
      cfg.quad_size = ranged(line, key, v, 0, 4096);
    } else if (key == "L") {
      cfg.L = to_double(line, key, v);
      if (!(cfg.L > 0.0)) fail(line, "L must be positive");
    } else if (key == "M") {
      cfg.M = ranged(line, key, v, 8, 1024);
      if (cfg.M % 2 != 0) fail(line, "M must be even");
    } else if (key == "M_char") {
      cfg.M_char = ranged(line, key, v, 0, 64);
    } else if (key == "T") {
      cfg.T = ranged(line, key, v, 4, 1024);
    } else if (key == "epsilon") {
      cfg.epsilon = to_double(line, key, v);
      if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) fail(line, "epsilon must lie in (0, 1)");
    } else if (key == "seed") {
      std::uint64_t s = 0;
      const auto r = std::from_chars(v.data(), v.data() + v.size(), s);
      if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        fail(line, "seed: expected an unsigned 64-bit integer, got '" + v + "'");
      cfg.seed = s;
    } else if (key == "iterations") {
      cfg.iterations = ranged(line, key, v, 1, 100000);
    } else if (key == "rank_cap") {
      cfg.rank_cap = ranged(line, key, v, 1, 4096);
    } else if (key == "algebra_file") {
      cfg.algebra_file = v;
    } else if (key == "output_dir") {
      cfg.output_dir = v;
    } else if (key == "omega") {
      std::istringstream parts(v);
      std::string item;
      while (std::getline(parts, item, ',')) cfg.omega.push_back(to_double(line, key, trim(item)));
      bool nonzero = false;
      for (double w : cfg.omega) nonzero = nonzero || w != 0.0;
      if (!nonzero) fail(line, "omega must be a nonzero vector");
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  if (seen.empty()) throw ConfigError("config: no settings found (empty or comment-only text)");
  validate_config(cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.T < 2 * cfg.M_char + 4)
    throw ConfigError("config: T = " + std::to_string(cfg.T) + " must be >= 2 M_char + 4 = " +
                      std::to_string(2 * cfg.M_char + 4));
  if (cfg.quad_size != 0 && cfg.quad_size < 2 * cfg.degree_cap + 8)
    throw ConfigError("config: quad_size must be 0 or >= 2 degree_cap + 8");
  if (cfg.n == 2 && cfg.M > 32)
    throw ConfigError("config: n = 2 grids are limited to M <= 32 (M^4 points)");
  if (cfg.suite != Suite::all) {
    bool ok = false;
    for (Group g : suite_groups(cfg.suite)) ok = ok || g == cfg.group;
    if (!ok)
      throw ConfigError("config: suite '" + to_string(cfg.suite) + "' is not defined for group '" +
                        to_string(cfg.group) + "'");
    const bool line_only = cfg.group == Group::motion || cfg.suite == Suite::product_law ||
                           cfg.suite == Suite::rank_profile || cfg.suite == Suite::kernel_support ||
                           cfg.suite == Suite::pocs;
    if (line_only && cfg.n != 1)
      throw ConfigError("config: suite '" + to_string(cfg.suite) + "' for group '" +
                        to_string(cfg.group) + "' is implemented for n = 1 only");
  }
}

}  // namespace weylkit
