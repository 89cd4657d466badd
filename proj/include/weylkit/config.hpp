#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace weylkit {

enum class Suite {
  plancherel,
  ortho,
  intertwine,
  product_law,
  symplectic,
  inversion,
  rank_profile,
  kernel_support,
  pocs,
  all
};

enum class Group { heisenberg, motion, step2 };

std::string to_string(Suite s);
std::string to_string(Group g);
/// All suites except `all`, in run order.
const std::vector<Suite>& concrete_suites();
/// Groups a suite is defined for.
std::vector<Group> suite_groups(Suite s);

/// Flat run configuration.  Every field has a default.
struct RunConfig {
  Suite suite = Suite::all;
  Group group = Group::heisenberg;
  int n = 1;
  double lambda = 1.0;
  int degree_cap = 24;
  int quad_size = 0;  // 0: 2 degree_cap + 8
  double L = 12.0;
  int M = 256;
  int M_char = 16;
  int T = 40;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;
  int iterations = 200;
  int rank_cap = 1;
  std::string algebra_file;  // empty: shipped fixtures
  std::string output_dir = "weylkit_out";
  std::vector<double> omega;  // empty: seeded sweep of 10 directions per algebra
};

/// Parses `key = value` lines ('#' comments, blank lines ignored).  Unknown or
/// duplicate keys, malformed values and range violations raise ConfigError
/// naming the line.  Text without any key is rejected.
RunConfig parse_config(const std::string& text);

/// Cross-key checks (T >= 2 M_char + 4, quad_size, grid size for n = 2);
/// parse_config calls it, and callers re-run it after command-line overrides.
void validate_config(const RunConfig& cfg);

}  // namespace weylkit
