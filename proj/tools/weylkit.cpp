// weylkit: run identity suites, list them, print the shipped fixtures.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "weylkit/errors.hpp"
#include "weylkit/suites.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw weylkit::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of Weyl-transform identities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", weylkit::kLibraryVersion);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run the configured suites; exit 0 when every identity holds");
  run->add_option("--config", config_path, "Config file, or 'defaults'")->required();
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* seed_opt = run->add_option("--seed", seed, "Seed (overrides seed)");

  auto* list = app.add_subcommand("list-suites", "Suites and the groups they apply to");
  auto* fixtures = app.add_subcommand("fixtures", "Print the shipped structure-constant files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      std::cout << weylkit::list_suites_text();
      return 0;
    }
    if (*fixtures) {
      std::cout << weylkit::fixtures_text();
      return 0;
    }
    weylkit::RunConfig cfg;
    if (config_path != "defaults") cfg = weylkit::parse_config(read_file(config_path));
    if (*out_opt) cfg.output_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    weylkit::validate_config(cfg);

    const auto outcome = weylkit::run(cfg);
    std::size_t passed = 0;
    for (const auto& r : outcome.report.results) {
      passed += r.pass ? 1 : 0;
      std::cout << (r.pass ? "ok   " : "FAIL ") << r.suite << '/' << r.group << "  " << r.identity
                << "  residual " << weylkit::format_double(r.residual) << ' ' << r.relation << ' '
                << weylkit::format_double(r.tolerance);
      if (!r.note.empty()) std::cout << "  (" << r.note << ')';
      std::cout << '\n';
    }
    for (const auto& s : outcome.report.skipped) std::cout << "skip " << s << '\n';
    std::cout << passed << '/' << outcome.report.results.size() << " identities hold; report in "
              << cfg.output_dir << '\n';
    return weylkit::exit_status(outcome.report);
  } catch (const weylkit::ConfigError& e) {
    std::cerr << "weylkit: " << e.what() << '\n';
    return 2;
  }
}
