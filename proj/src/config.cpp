#include "walg/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "walg/errors.hpp"

namespace walg {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Rational parse_rational_key(const std::string& key, const std::string& value) {
  try {
    return parse_rational(value);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a rational 'p/q': '" + value + "'");
  }
}

int parse_int_key(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int out = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: '" + value + "'");
  }
}

double parse_double_key(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + value + "'");
  }
}

bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

std::string fmt_tol(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

AlgebraSpec RunConfig::algebra_spec() const {
  switch (algebra) {
    case AlgebraKind::Virasoro:
      return AlgebraSpec::virasoro(c);
    case AlgebraKind::W3:
      return AlgebraSpec::w3(c);
    case AlgebraKind::Heisenberg:
      return AlgebraSpec::heisenberg();
  }
  throw ConfigError("algebra: unknown kind");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::string suite_list;
  for (const std::string& s : suites) {
    if (!suite_list.empty()) suite_list += ",";
    suite_list += s;
  }
  return {{"algebra", to_string(algebra)},
          {"c", to_string(c)},
          {"h", to_string(h)},
          {"w", to_string(w)},
          {"max_level", std::to_string(max_level)},
          {"tolerance", fmt_tol(tolerance)},
          {"suites", suite_list},
          {"out", out_dir},
          {"ode_steps", std::to_string(ode_steps)},
          {"grid_size", std::to_string(grid_size)},
          {"workers", std::to_string(workers)}};
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names = {"gram",    "kac",    "t2bound", "oscillator",
                                                 "wbounds", "circle", "build",   "probe"};
  return names;
}

bool suite_is_theorem_backed(const std::string& name) {
  return name != "build" && name != "probe";
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    apply_override(config, trimmed(line.substr(0, eq)), trimmed(line.substr(eq + 1)));
  }
  return config;
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "algebra") {
    try {
      config.algebra = parse_algebra_kind(value);
    } catch (const std::exception&) {
      throw ConfigError("algebra: unknown kind '" + value + "'");
    }
  } else if (key == "c") {
    config.c = parse_rational_key(key, value);
  } else if (key == "h") {
    config.h = parse_rational_key(key, value);
  } else if (key == "w") {
    config.w = parse_rational_key(key, value);
  } else if (key == "max_level") {
    config.max_level = parse_int_key(key, value);
  } else if (key == "tolerance") {
    config.tolerance = parse_double_key(key, value);
  } else if (key == "suites") {
    config.suites.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trimmed(item);
      if (!item.empty()) config.suites.push_back(item);
    }
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "ode_steps") {
    config.ode_steps = parse_int_key(key, value);
  } else if (key == "grid_size") {
    config.grid_size = parse_int_key(key, value);
  } else if (key == "workers") {
    config.workers = parse_int_key(key, value);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void validate_config(const RunConfig& config) {
  if (config.max_level < 0 || config.max_level > 14)
    throw ConfigError("max_level: must be between 0 and the hard cap 14, got " +
                      std::to_string(config.max_level));
  if (!(config.tolerance >= 1e-12 && config.tolerance <= 1e-4))
    throw ConfigError("tolerance: must lie in [1e-12, 1e-4]");
  if (!is_pow2(config.ode_steps) || config.ode_steps < 8)
    throw ConfigError("ode_steps: must be a power of two, at least 8");
  if (!is_pow2(config.grid_size) || config.grid_size < 8)
    throw ConfigError("grid_size: must be a power of two, at least 8");
  if (config.workers < 1) throw ConfigError("workers: must be at least 1");
  if (config.algebra == AlgebraKind::W3 && config.c == rat(-22, 5))
    throw ConfigError("c: -22/5 is outside the W3 family");
  for (const std::string& name : config.suites)
    if (std::find(known_suites().begin(), known_suites().end(), name) == known_suites().end())
      throw ConfigError("suites: unknown suite name '" + name + "'");
  if (config.out_dir.empty()) throw ConfigError("out: output directory must be nonempty");
}

}  // namespace walg
