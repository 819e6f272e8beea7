#pragma once

#include <string>
#include <vector>

#include "walg/mode_algebra.hpp"
#include "walg/rational.hpp"

namespace walg {

// ---------------------------------------------------------------------------
// Batch run configuration
// ---------------------------------------------------------------------------
//
// Flat key-value text file plus command-line overrides; no nesting.  Keys:
//   algebra    virasoro | w3 | heisenberg
//   c, h, w    exact rationals as "p/q"
//   max_level  hard cap 14 (partition growth guard)
//   tolerance  float in [1e-12, 1e-4]
//   suites     comma-separated subset of known_suites()
//   out        report output directory
//   ode_steps  RK4 step count for circle flows (power of two, >= 8)
//   grid_size  circle sampling grid (power of two, >= 8)
//   workers    parallel suite runners (>= 1)

struct RunConfig {
  AlgebraKind algebra = AlgebraKind::W3;
  Rational c{3};
  Rational h{0};
  Rational w{0};
  int max_level = 8;
  double tolerance = 1e-9;
  std::vector<std::string> suites;
  std::string out_dir = "reports";
  int ode_steps = 4096;
  int grid_size = 4096;
  int workers = 1;

  AlgebraSpec algebra_spec() const;
  // Key-value echo used in the summary report (deterministic ordering).
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// The suites run_suites knows how to execute.  gram, kac, t2bound,
// oscillator, wbounds and circle are theorem-backed; build and probe are
// informational and never affect the exit status.
const std::vector<std::string>& known_suites();
bool suite_is_theorem_backed(const std::string& name);

// Parses a flat key-value file ('#' comments, blank lines ignored, one
// "key = value" per line).  ConfigError names the offending key or line.
RunConfig parse_config_file(const std::string& path);

// Applies one override; shared by the file parser and the CLI flags.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Enforces every invariant (caps, ranges, known suite names).  ConfigError
// messages name the offending key.
void validate_config(const RunConfig& config);

}  // namespace walg
