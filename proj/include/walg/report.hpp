#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "walg/bounds.hpp"
#include "walg/circle.hpp"
#include "walg/lowest_weight.hpp"

namespace walg {

// ---------------------------------------------------------------------------
// Report documents
// ---------------------------------------------------------------------------
//
// Every report is a JSON object carrying the envelope fields
//   schema_version, type, timestamp (timestamp injected at write time)
// plus type-specific payload.  Exact rationals travel as "p/q" strings
// end-to-end; floating values appear only in norm/eigenvalue/margin fields
// and are always accompanied by the tolerance they were compared against.
// Matrices exported as CSV use exact "p/q" cells where the source is exact.

inline constexpr const char* report_schema_version = "1.0.0";

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Rational and matrix wire formats
// ---------------------------------------------------------------------------

// "p/q" (or plain "p" for integers), the format parse_rational accepts.
std::string rational_string(const Rational& r);

// Complex cell: "p/q" when real, otherwise "re|im" with both parts rational.
std::string gaussian_string(const GaussianRational& z);
GaussianRational parse_gaussian(const std::string& text);

// CSV with one matrix row per line and exact "p/q" cells.
std::string matrix_csv(const RatMat& m);
std::string matrix_csv(const GaussMat& m);
RatMat rat_matrix_from_csv(const std::string& text);
GaussMat gauss_matrix_from_csv(const std::string& text);

// ---------------------------------------------------------------------------
// Module and suite reports
// ---------------------------------------------------------------------------

// "module": the graded skeleton of a built module (per-level dims and
// quotient ranks), for the build subcommand.  Gram blocks go to CSV
// attachments named in gram_files.
Json module_report(GradedModule& mod, const std::vector<std::string>& gram_files);

// Gram block of one level as exact CSV.
std::string gram_csv(GradedModule& mod, int level);

// "gram": per-level positive-semidefiniteness verdicts.  A level is psd when
// the radical quotient (exact LDL with nonnegative pivots) exists.
Json gram_report(GradedModule& mod, bool pass, const std::vector<std::string>& notes);

// "kac": determinant signs and ranks from kac_positivity_report.
Json kac_report(const Rational& c, const Rational& h,
                const std::vector<KacLevelReport>& rows, bool pass);
std::string kac_csv(const std::vector<KacLevelReport>& rows);

// "bound": any BoundReport (t2_bound_check, recursion_verify,
// w_optimal_report).
Json bound_report_json(const BoundReport& report);
std::string margins_csv(const BoundReport& report);

// "circle" and "oscillator" reports are assembled from named check rows.
struct CheckRow {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
Json check_rows_report(const std::string& type, bool pass,
                       const std::vector<CheckRow>& rows,
                       const std::vector<std::string>& notes);

// "probe": exploratory truncated-spectrum and local-bound data; never gates
// an exit status.
Json probe_report(const Rational& c, int cutoff, const std::vector<int>& cutoffs,
                  const std::vector<double>& t_min_values, const ProbeReport& probe);

// ---------------------------------------------------------------------------
// Test functions and diffeomorphisms
// ---------------------------------------------------------------------------

// "function": exact coefficient list {n, re, im}.  Both directions preserve
// the coefficients exactly (grid provenance is not serialized).
Json test_function_json(const TestFunction& f);
TestFunction test_function_from_json(const Json& doc);

// Grid samples as CSV rows index,theta,re,im.
std::string samples_csv(const TestFunction& f, std::size_t size);

// Diffeomorphism lift as CSV rows index,theta,lift.
std::string lift_csv(const CircleDiffeo& gamma);

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

// The versioned schema of every report type: an object
//   { schema_version, definitions: { TypeName: { fields: { name: spec } } } }
// where spec is one of "string", "rational", "int", "number", "bool",
// "map:string", "array:<spec>", "ref:<TypeName>", with a trailing "?" for
// optional fields.  "number" accepts integers; "rational" is a string that
// parse_rational accepts.
Json report_schema();

// Validates a report document against the schema: envelope present, the
// type's definition exists, required fields present, field types match, and
// no fields outside the definition.  Throws ConfigError naming the offending
// path on the first violation.
void validate_report(const Json& doc);

}  // namespace walg
