#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "walg/config.hpp"
#include "walg/report.hpp"

namespace walg {

// ---------------------------------------------------------------------------
// Suite execution
// ---------------------------------------------------------------------------

struct SuiteResult {
  std::string name;
  bool theorem_backed = true;
  bool pass = false;
  // Report document without the timestamp (injected at write time so that
  // identical configs produce byte-identical files modulo that one field).
  Json report;
  // Extra CSV files, written next to the report as <suite>_<first>.
  std::vector<std::pair<std::string, std::string>> attachments;
};

// Runs a single suite by name.  Theorem-backed suites (gram, kac, t2bound,
// oscillator, wbounds, circle) set pass from their checks; build and probe
// are informational and always report pass = true unless they throw.
// Preconditions that the configured algebra cannot satisfy (wbounds without
// w3, t2bound or probe on the Heisenberg algebra) raise ConfigError.
SuiteResult run_one_suite(const std::string& name, const RunConfig& config);

// Validates the config, resolves the suite selection (an empty list means
// every theorem-backed suite applicable to the configured algebra), runs the
// suites with up to config.workers parallel runners, writes one JSON report
// per suite plus attachments and a summary.json into config.out_dir, and
// returns the exit status: 0 iff every selected theorem-backed suite passed.
// Exploratory suites never affect the status.  Progress goes to `log`.
int run_suites(const RunConfig& config, std::ostream& log);

}  // namespace walg
