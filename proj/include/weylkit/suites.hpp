#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "weylkit/config.hpp"
#include "weylkit/report.hpp"

namespace weylkit {

struct RunOutcome {
  Report report;
  std::vector<std::pair<std::string, double>> timings;  // "suite/group" -> seconds
  double wall_seconds = 0.0;
};

/// Runs the configured suites and writes report.json, timing.json and the CSV
/// artifacts into cfg.output_dir.  Configuration problems found before any
/// computation (unreadable algebra file, omega of the wrong length, output
/// directory not writable) raise ConfigError and leave no report.
RunOutcome run(const RunConfig& cfg);

/// 0 when every identity passed, 1 otherwise.
int exit_status(const Report& r);

/// One line per suite: name and the groups it is defined for.
std::string list_suites_text();

/// The shipped structure-constant files, each preceded by a header line.
std::string fixtures_text();

}  // namespace weylkit
