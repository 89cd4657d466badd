#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "weylkit/config.hpp"

namespace weylkit {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// One verified statement.  pass is decided by the suite: residual <= tolerance
/// for relation "<=", residual > tolerance for relation ">".
struct IdentityResult {
  std::string suite;
  std::string group;
  std::string identity;
  std::string statement;
  std::string relation = "<=";
  double tolerance = 0.0;
  double residual = 0.0;
  bool pass = false;
  std::string note;  // exception text or extra detail; empty when none
};

struct Report {
  RunConfig config;
  std::vector<IdentityResult> results;
  std::vector<std::string> artifacts;  // file names inside output_dir
  std::vector<std::string> skipped;    // "suite/group: reason"
  bool all_pass() const;
};

nlohmann::json config_json(const RunConfig& cfg);
/// Sorted keys, no timing information.
nlohmann::json report_json(const Report& r);

/// Shortest decimal that round-trips (std::to_chars); '.' decimal point.
std::string format_double(double x);

/// CSV with a header row and '\n' line ends.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string text() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace weylkit
