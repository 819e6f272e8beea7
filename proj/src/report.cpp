#include "walg/report.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "walg/errors.hpp"

namespace walg {

namespace {

// Shortest-round-trip style float formatting shared by all CSV emitters so
// identical inputs produce byte-identical files.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename Scalar, typename Parse>
Mat<Scalar> matrix_from_csv_impl(const std::string& text, Parse&& parse) {
  std::vector<std::vector<Scalar>> rows;
  std::size_t cols = 0;
  for (const std::string& line : split(text, '\n')) {
    if (trimmed(line).empty()) continue;
    std::vector<Scalar> row;
    for (const std::string& cell : split(line, ',')) row.push_back(parse(trimmed(cell)));
    if (rows.empty())
      cols = row.size();
    else if (row.size() != cols)
      throw ConfigError("matrix CSV: ragged rows");
    rows.push_back(std::move(row));
  }
  Mat<Scalar> out(rows.size(), rows.empty() ? 0 : cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) out.at(i, j) = rows[i][j];
  return out;
}

Json envelope(const std::string& type) {
  Json doc;
  doc["schema_version"] = report_schema_version;
  doc["type"] = type;
  return doc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Wire formats
// ---------------------------------------------------------------------------

std::string rational_string(const Rational& r) { return to_string(r); }

std::string gaussian_string(const GaussianRational& z) {
  if (z.im == 0) return to_string(z.re);
  return to_string(z.re) + "|" + to_string(z.im);
}

GaussianRational parse_gaussian(const std::string& text) {
  const std::size_t bar = text.find('|');
  if (bar == std::string::npos) return GaussianRational(parse_rational(text));
  return GaussianRational(parse_rational(text.substr(0, bar)),
                          parse_rational(text.substr(bar + 1)));
}

std::string matrix_csv(const RatMat& m) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ",";
      os << to_string(m.at(i, j));
    }
    os << "\n";
  }
  return os.str();
}

std::string matrix_csv(const GaussMat& m) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ",";
      os << gaussian_string(m.at(i, j));
    }
    os << "\n";
  }
  return os.str();
}

RatMat rat_matrix_from_csv(const std::string& text) {
  return matrix_from_csv_impl<Rational>(text,
                                        [](const std::string& c) { return parse_rational(c); });
}

GaussMat gauss_matrix_from_csv(const std::string& text) {
  return matrix_from_csv_impl<GaussianRational>(
      text, [](const std::string& c) { return parse_gaussian(c); });
}

// ---------------------------------------------------------------------------
// Module and suite reports
// ---------------------------------------------------------------------------

namespace {

Json module_header(GradedModule& mod) {
  Json doc;
  doc["algebra"] = to_string(mod.algebra().kind);
  doc["c"] = rational_string(mod.algebra().c);
  doc["h"] = rational_string(mod.lowest_h());
  doc["w"] = rational_string(mod.lowest_w());
  doc["max_level"] = mod.max_built();
  return doc;
}

}  // namespace

Json module_report(GradedModule& mod, const std::vector<std::string>& gram_files) {
  Json doc = envelope("module");
  doc.update(module_header(mod));
  Json levels = Json::array();
  for (int n = 0; n <= mod.max_built(); ++n) {
    Json row;
    row["level"] = n;
    row["dim"] = static_cast<int>(mod.dim(n));
    row["rank"] = static_cast<int>(mod.quotient_rank(n));
    levels.push_back(std::move(row));
  }
  doc["levels"] = std::move(levels);
  doc["gram_files"] = gram_files;
  return doc;
}

std::string gram_csv(GradedModule& mod, int level) { return matrix_csv(mod.gram_matrix(level)); }

Json gram_report(GradedModule& mod, bool pass, const std::vector<std::string>& notes) {
  Json doc = envelope("gram");
  doc.update(module_header(mod));
  Json levels = Json::array();
  for (int n = 0; n <= mod.max_built(); ++n) {
    Json row;
    row["level"] = n;
    row["dim"] = static_cast<int>(mod.dim(n));
    bool psd = true;
    int rank = 0;
    try {
      rank = static_cast<int>(mod.quotient_rank(n));
    } catch (const NegativeFormError&) {
      psd = false;
    }
    row["rank"] = rank;
    row["psd"] = psd;
    levels.push_back(std::move(row));
  }
  doc["levels"] = std::move(levels);
  doc["pass"] = pass;
  doc["notes"] = notes;
  return doc;
}

Json kac_report(const Rational& c, const Rational& h,
                const std::vector<KacLevelReport>& rows, bool pass) {
  Json doc = envelope("kac");
  doc["c"] = rational_string(c);
  doc["h"] = rational_string(h);
  doc["max_level"] = rows.empty() ? 0 : rows.back().level;
  Json out = Json::array();
  for (const KacLevelReport& row : rows) {
    Json r;
    r["level"] = row.level;
    r["det_sign"] = row.det_sign;
    r["rank"] = static_cast<int>(row.rank);
    r["min_eigenvalue_estimate"] = row.min_eigenvalue_estimate;
    out.push_back(std::move(r));
  }
  doc["rows"] = std::move(out);
  doc["pass"] = pass;
  return doc;
}

std::string kac_csv(const std::vector<KacLevelReport>& rows) {
  std::ostringstream os;
  os << "level,det_sign,rank,min_eigenvalue_estimate\n";
  for (const KacLevelReport& row : rows)
    os << row.level << "," << row.det_sign << "," << row.rank << ","
       << fmt(row.min_eigenvalue_estimate) << "\n";
  return os.str();
}

Json bound_report_json(const BoundReport& report) {
  Json doc = envelope("bound");
  doc["inequality"] = report.inequality;
  doc["c"] = rational_string(report.c);
  doc["h"] = rational_string(report.h);
  doc["k"] = report.k;
  doc["beta"] = report.beta;
  doc["s"] = report.s;
  doc["d"] = report.d;
  doc["constant"] = report.constant;
  doc["improved_constant"] = report.improved_constant;
  doc["tolerance"] = report.tolerance;
  Json margins = Json::array();
  for (const MarginRow& row : report.margins) {
    Json r;
    r["check"] = row.check;
    r["level"] = row.level;
    r["margin"] = row.margin;
    margins.push_back(std::move(r));
  }
  doc["margins"] = std::move(margins);
  doc["notes"] = report.notes;
  doc["pass"] = report.pass;
  return doc;
}

std::string margins_csv(const BoundReport& report) {
  std::ostringstream os;
  os << "check,level,margin\n";
  for (const MarginRow& row : report.margins)
    os << row.check << "," << row.level << "," << fmt(row.margin) << "\n";
  return os.str();
}

Json check_rows_report(const std::string& type, bool pass,
                       const std::vector<CheckRow>& rows,
                       const std::vector<std::string>& notes) {
  Json doc = envelope(type);
  Json out = Json::array();
  for (const CheckRow& row : rows) {
    Json r;
    r["name"] = row.name;
    r["value"] = row.value;
    r["bound"] = row.bound;
    r["tolerance"] = row.tolerance;
    r["pass"] = row.pass;
    out.push_back(std::move(r));
  }
  doc["rows"] = std::move(out);
  doc["pass"] = pass;
  doc["notes"] = notes;
  return doc;
}

Json probe_report(const Rational& c, int cutoff, const std::vector<int>& cutoffs,
                  const std::vector<double>& t_min_values, const ProbeReport& probe) {
  Json doc = envelope("probe");
  doc["c"] = rational_string(c);
  doc["cutoff"] = cutoff;
  doc["r_hat"] = probe.r_hat;
  Json tmin = Json::array();
  for (std::size_t i = 0; i < cutoffs.size() && i < t_min_values.size(); ++i) {
    Json r;
    r["cutoff"] = cutoffs[i];
    r["value"] = t_min_values[i];
    tmin.push_back(std::move(r));
  }
  doc["t_min"] = std::move(tmin);
  Json samples = Json::array();
  for (const ProbeRow& row : probe.rows) {
    Json r;
    r["label"] = row.label;
    r["level"] = row.level;
    r["numerator"] = row.numerator;
    r["denominator"] = row.denominator;
    r["ratio"] = row.ratio;
    r["skipped"] = row.skipped;
    samples.push_back(std::move(r));
  }
  doc["samples"] = std::move(samples);
  doc["notes"] = probe.notes;
  return doc;
}

// ---------------------------------------------------------------------------
// Test functions and diffeomorphisms
// ---------------------------------------------------------------------------

Json test_function_json(const TestFunction& f) {
  Json doc = envelope("function");
  doc["exact"] = f.is_exact();
  doc["real"] = f.is_real();
  Json coeffs = Json::array();
  for (const auto& [n, value] : f.coefficients()) {
    Json r;
    r["n"] = n;
    r["re"] = to_string(value.re);
    r["im"] = to_string(value.im);
    coeffs.push_back(std::move(r));
  }
  doc["coefficients"] = std::move(coeffs);
  return doc;
}

TestFunction test_function_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("coefficients") || !doc["coefficients"].is_array())
    throw ConfigError("function document: missing coefficients array");
  std::map<int, GaussianRational> coeffs;
  for (const Json& row : doc["coefficients"]) {
    if (!row.contains("n") || !row.contains("re") || !row.contains("im") ||
        !row["n"].is_number_integer() || !row["re"].is_string() || !row["im"].is_string())
      throw ConfigError("function document: coefficient rows need n, re, im");
    try {
      coeffs[row["n"].get<int>()] =
          GaussianRational(parse_rational(row["re"].get<std::string>()),
                           parse_rational(row["im"].get<std::string>()));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("function document: malformed rational coefficient");
    }
  }
  const bool exact = !doc.contains("exact") || doc["exact"].get<bool>();
  return TestFunction::from_coefficients(coeffs, exact);
}

std::string samples_csv(const TestFunction& f, std::size_t size) {
  const std::vector<std::complex<double>> vals = f.samples(size);
  std::ostringstream os;
  os << "index,theta,re,im\n";
  for (std::size_t j = 0; j < vals.size(); ++j) {
    const double theta = 2.0 * std::numbers::pi * double(j) / double(vals.size());
    os << j << "," << fmt(theta) << "," << fmt(vals[j].real()) << "," << fmt(vals[j].imag())
       << "\n";
  }
  return os.str();
}

std::string lift_csv(const CircleDiffeo& gamma) {
  const std::vector<double>& lift = gamma.lift();
  std::ostringstream os;
  os << "index,theta,lift\n";
  for (std::size_t j = 0; j < lift.size(); ++j) {
    const double theta = 2.0 * std::numbers::pi * double(j) / double(lift.size());
    os << j << "," << fmt(theta) << "," << fmt(lift[j]) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

Json report_schema() {
  Json defs;
  defs["ModuleLevel"]["fields"] = {{"level", "int"}, {"dim", "int"}, {"rank", "int"}};
  defs["GramLevel"]["fields"] = {
      {"level", "int"}, {"dim", "int"}, {"rank", "int"}, {"psd", "bool"}};
  defs["module"]["fields"] = {{"algebra", "string"},
                              {"c", "rational"},
                              {"h", "rational"},
                              {"w", "rational"},
                              {"max_level", "int"},
                              {"levels", "array:ref:ModuleLevel"},
                              {"gram_files", "array:string"}};
  defs["gram"]["fields"] = {{"algebra", "string"},
                            {"c", "rational"},
                            {"h", "rational"},
                            {"w", "rational"},
                            {"max_level", "int"},
                            {"levels", "array:ref:GramLevel"},
                            {"pass", "bool"},
                            {"notes", "array:string"}};
  defs["KacRow"]["fields"] = {{"level", "int"},
                              {"det_sign", "int"},
                              {"rank", "int"},
                              {"min_eigenvalue_estimate", "number"}};
  defs["kac"]["fields"] = {{"c", "rational"},
                           {"h", "rational"},
                           {"max_level", "int"},
                           {"rows", "array:ref:KacRow"},
                           {"pass", "bool"}};
  defs["MarginRow"]["fields"] = {{"check", "string"}, {"level", "int"}, {"margin", "number"}};
  defs["bound"]["fields"] = {{"inequality", "string"},
                             {"c", "rational"},
                             {"h", "rational"},
                             {"k", "int"},
                             {"beta", "number"},
                             {"s", "number"},
                             {"d", "int"},
                             {"constant", "number"},
                             {"improved_constant", "number"},
                             {"tolerance", "number"},
                             {"margins", "array:ref:MarginRow"},
                             {"notes", "array:string"},
                             {"pass", "bool"}};
  defs["CheckRow"]["fields"] = {{"name", "string"},
                                {"value", "number"},
                                {"bound", "number"},
                                {"tolerance", "number"},
                                {"pass", "bool"}};
  defs["circle"]["fields"] = {
      {"rows", "array:ref:CheckRow"}, {"pass", "bool"}, {"notes", "array:string"}};
  defs["oscillator"]["fields"] = {
      {"rows", "array:ref:CheckRow"}, {"pass", "bool"}, {"notes", "array:string"}};
  defs["TminRow"]["fields"] = {{"cutoff", "int"}, {"value", "number"}};
  defs["ProbeSampleRow"]["fields"] = {{"label", "string"},  {"level", "int"},
                                      {"numerator", "number"}, {"denominator", "number"},
                                      {"ratio", "number"},  {"skipped", "bool"}};
  defs["probe"]["fields"] = {{"c", "rational"},
                             {"cutoff", "int"},
                             {"r_hat", "number"},
                             {"t_min", "array:ref:TminRow"},
                             {"samples", "array:ref:ProbeSampleRow"},
                             {"notes", "array:string"}};
  defs["Coefficient"]["fields"] = {{"n", "int"}, {"re", "rational"}, {"im", "rational"}};
  defs["function"]["fields"] = {
      {"exact", "bool"}, {"real", "bool"}, {"coefficients", "array:ref:Coefficient"}};
  defs["SuiteStatus"]["fields"] = {{"name", "string"},
                                   {"theorem_backed", "bool"},
                                   {"pass", "bool"},
                                   {"report", "string"}};
  defs["summary"]["fields"] = {{"config", "map:string"},
                               {"suites", "array:ref:SuiteStatus"},
                               {"exit_status", "int"}};
  defs["error"]["fields"] = {{"suite", "string"}, {"message", "string"}};

  Json doc;
  doc["schema_version"] = report_schema_version;
  doc["definitions"] = std::move(defs);
  return doc;
}

namespace {

void validate_value(const Json& schema, const Json& value, const std::string& spec,
                    const std::string& path);

void validate_object(const Json& schema, const Json& value, const std::string& type,
                     const std::string& path, bool top_level) {
  const Json& defs = schema["definitions"];
  if (!defs.contains(type))
    throw ConfigError("report validation: unknown type '" + type + "' at " + path);
  if (!value.is_object())
    throw ConfigError("report validation: expected object at " + path);
  const Json& fields = defs[type]["fields"];
  for (auto it = fields.begin(); it != fields.end(); ++it) {
    std::string spec = it.value().get<std::string>();
    bool optional = false;
    if (!spec.empty() && spec.back() == '?') {
      optional = true;
      spec.pop_back();
    }
    const std::string child = path + "." + it.key();
    if (!value.contains(it.key())) {
      if (optional) continue;
      throw ConfigError("report validation: missing field " + child);
    }
    validate_value(schema, value[it.key()], spec, child);
  }
  for (auto it = value.begin(); it != value.end(); ++it) {
    if (top_level &&
        (it.key() == "schema_version" || it.key() == "type" || it.key() == "timestamp"))
      continue;
    if (!fields.contains(it.key()))
      throw ConfigError("report validation: unexpected field " + path + "." + it.key());
  }
}

void validate_value(const Json& schema, const Json& value, const std::string& spec,
                    const std::string& path) {
  if (spec == "string") {
    if (!value.is_string()) throw ConfigError("report validation: expected string at " + path);
  } else if (spec == "rational") {
    if (!value.is_string()) throw ConfigError("report validation: expected rational at " + path);
    try {
      (void)parse_rational(value.get<std::string>());
    } catch (const std::exception&) {
      throw ConfigError("report validation: malformed rational at " + path);
    }
  } else if (spec == "int") {
    if (!value.is_number_integer())
      throw ConfigError("report validation: expected integer at " + path);
  } else if (spec == "number") {
    if (!value.is_number()) throw ConfigError("report validation: expected number at " + path);
  } else if (spec == "bool") {
    if (!value.is_boolean()) throw ConfigError("report validation: expected bool at " + path);
  } else if (spec == "map:string") {
    if (!value.is_object()) throw ConfigError("report validation: expected object at " + path);
    for (auto it = value.begin(); it != value.end(); ++it)
      if (!it.value().is_string())
        throw ConfigError("report validation: expected string at " + path + "." + it.key());
  } else if (spec.rfind("array:", 0) == 0) {
    if (!value.is_array()) throw ConfigError("report validation: expected array at " + path);
    const std::string inner = spec.substr(6);
    for (std::size_t i = 0; i < value.size(); ++i)
      validate_value(schema, value[i], inner, path + "[" + std::to_string(i) + "]");
  } else if (spec.rfind("ref:", 0) == 0) {
    validate_object(schema, value, spec.substr(4), path, false);
  } else {
    throw ConfigError("report validation: schema has unknown spec '" + spec + "' at " + path);
  }
}

}  // namespace

void validate_report(const Json& doc) {
  const Json schema = report_schema();
  if (!doc.is_object()) throw ConfigError("report validation: document is not an object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_string() ||
      doc["schema_version"].get<std::string>() != report_schema_version)
    throw ConfigError("report validation: schema_version missing or not " +
                      std::string(report_schema_version));
  if (!doc.contains("type") || !doc["type"].is_string())
    throw ConfigError("report validation: missing type field");
  if (doc.contains("timestamp") && !doc["timestamp"].is_string())
    throw ConfigError("report validation: timestamp must be a string");
  validate_object(schema, doc, doc["type"].get<std::string>(), "$", true);
}

}  // namespace walg
