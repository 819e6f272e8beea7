// Command-line front end: configures a run from defaults, an optional flat
// config file, and flag overrides, then executes check suites and writes
// versioned JSON/CSV reports.  Exit status: 0 all theorem-backed suites pass,
// 1 at least one failed, 2 configuration or usage error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "walg/config.hpp"
#include "walg/errors.hpp"
#include "walg/report.hpp"
#include "walg/run_suites.hpp"

int main(int argc, char** argv) {
  CLI::App app{"exact graded-module, oscillator-bound and circle-action check runner"};
  // --h is the lowest-weight flag, so help lives on --help alone.
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file");

  // All value flags stay strings: the shared override parser validates them
  // and reports the offending key by name.
  struct Flag {
    const char* flag;
    const char* key;
    const char* help;
  };
  const std::vector<Flag> flags = {
      {"--algebra", "algebra", "virasoro, w3 or heisenberg"},
      {"--c", "c", "central charge, exact rational p/q"},
      {"--h", "h", "lowest conformal weight, exact rational p/q"},
      {"--w", "w", "lowest W charge, exact rational p/q"},
      {"--max-level", "max_level", "grading cutoff (hard cap 14)"},
      {"--tol", "tolerance", "float tolerance in [1e-12, 1e-4]"},
      {"--out", "out", "report output directory"},
      {"--workers", "workers", "max concurrent suites"},
      {"--suites", "suites", "comma-separated suite list"},
      {"--ode-steps", "ode_steps", "flow integrator steps (power of two)"},
      {"--grid-size", "grid_size", "circle sample grid size (power of two)"},
  };
  std::vector<std::string> values(flags.size());
  std::vector<CLI::Option*> options(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i)
    options[i] = app.add_option(flags[i].flag, values[i], flags[i].help);

  const std::vector<std::string> suite_subcommands = {
      "build", "gram", "kac", "t2bound", "oscillator", "wbounds", "circle", "probe"};
  for (const std::string& name : suite_subcommands) {
    CLI::App* sub = app.add_subcommand(name, "run only the " + name + " suite");
    sub->fallthrough();
  }
  CLI::App* schema_cmd = app.add_subcommand("schema", "print the report schema and exit");
  schema_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (schema_cmd->parsed()) {
    std::cout << walg::report_schema().dump(2) << "\n";
    return 0;
  }

  try {
    walg::RunConfig config;
    if (!config_path.empty()) config = walg::parse_config_file(config_path);
    for (std::size_t i = 0; i < flags.size(); ++i)
      if (options[i]->count() > 0) walg::apply_override(config, flags[i].key, values[i]);
    for (const std::string& name : suite_subcommands)
      if (app.get_subcommand(name)->parsed()) config.suites = {name};
    return walg::run_suites(config, std::cout);
  } catch (const walg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
