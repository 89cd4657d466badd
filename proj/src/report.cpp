#include "weylkit/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "weylkit/errors.hpp"

namespace weylkit {

bool Report::all_pass() const {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["suite"] = to_string(c.suite);
  j["group"] = to_string(c.group);
  j["n"] = c.n;
  j["lambda"] = c.lambda;
  j["degree_cap"] = c.degree_cap;
  j["quad_size"] = c.quad_size;
  j["L"] = c.L;
  j["M"] = c.M;
  j["M_char"] = c.M_char;
  j["T"] = c.T;
  j["epsilon"] = c.epsilon;
  j["seed"] = c.seed;
  j["iterations"] = c.iterations;
  j["rank_cap"] = c.rank_cap;
  j["algebra_file"] = c.algebra_file;
  j["output_dir"] = c.output_dir;
  j["omega"] = c.omega;
  return j;
}

nlohmann::json report_json(const Report& r) {
  nlohmann::json j;
  j["suite"] = to_string(r.config.suite);
  j["config"] = config_json(r.config);
  j["library_version"] = kLibraryVersion;
  j["seed"] = r.config.seed;
  j["all_pass"] = r.all_pass();
  j["artifacts"] = r.artifacts;
  j["skipped"] = r.skipped;
  auto& list = j["results"] = nlohmann::json::array();
  for (const auto& x : r.results) {
    nlohmann::json e;
    e["suite"] = x.suite;
    e["group"] = x.group;
    e["identity"] = x.identity;
    e["statement"] = x.statement;
    e["relation"] = x.relation;
    e["tolerance"] = x.tolerance;
    // Residuals stay finite in the file; a non-finite measurement is a failure.
    e["residual"] = std::isfinite(x.residual) ? x.residual : std::numeric_limits<double>::max();
    e["pass"] = x.pass;
    if (!x.note.empty()) e["note"] = x.note;
    list.push_back(std::move(e));
  }
  return j;
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw ContractError("CsvTable: row width differs from header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::text() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text();
}

}  // namespace weylkit
