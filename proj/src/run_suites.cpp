#include "walg/run_suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <semaphore>
#include <sstream>

#include "walg/bounds.hpp"
#include "walg/circle.hpp"
#include "walg/eig.hpp"
#include "walg/errors.hpp"
#include "walg/lowest_weight.hpp"
#include "walg/oscillator.hpp"

namespace walg {

namespace {

// ---------------------------------------------------------------------------
// Individual suites
// ---------------------------------------------------------------------------

GradedModule build_module(const RunConfig& config, int max_level) {
  GradedModule mod(config.algebra_spec(), config.h, config.w);
  mod.build_to(max_level);
  return mod;
}

void require_virasoro_part(const RunConfig& config, const std::string& suite) {
  if (config.algebra == AlgebraKind::Heisenberg)
    throw ConfigError("suites: " + suite + " requires a virasoro or w3 module");
}

SuiteResult run_gram(const RunConfig& config) {
  SuiteResult result{"gram", true, false, {}, {}};
  GradedModule mod = build_module(config, config.max_level);
  bool all_psd = true;
  for (int n = 0; n <= mod.max_built(); ++n) {
    try {
      (void)mod.quotient_rank(n);
    } catch (const NegativeFormError&) {
      all_psd = false;
    }
  }
  std::vector<std::string> notes;
  bool extra_ok = true;
  if (config.algebra == AlgebraKind::W3 && config.h == 0 && config.w == 0 && all_psd &&
      config.max_level >= 3) {
    // The lowest W descendant has squared norm c/3, read from the exact
    // quotient Gram form.
    const RatMat coords = mod.mode_matrix(gen_W(-3), 0);
    const QuotientData& q = mod.radical_quotient(3);
    const RatMat& gram = mod.gram_matrix(3);
    Rational norm_sq(0);
    for (std::size_t i = 0; i < coords.rows(); ++i)
      for (std::size_t j = 0; j < coords.rows(); ++j)
        norm_sq += coords.at(i, 0) * gram.at(q.selected[i], q.selected[j]) * coords.at(j, 0);
    const Rational expected = mod.algebra().c / 3;
    extra_ok = norm_sq == expected;
    notes.push_back("norm_sq(W_-3 vacuum) = " + to_string(norm_sq) + ", expected c/3 = " +
                    to_string(expected));
  }
  result.pass = all_psd && extra_ok;
  result.report = gram_report(mod, result.pass, notes);
  return result;
}

SuiteResult run_kac(const RunConfig& config) {
  SuiteResult result{"kac", true, false, {}, {}};
  const std::vector<KacLevelReport> rows =
      kac_positivity_report(config.c, config.h, config.max_level);
  // A zero determinant (null vectors present) is not a failure; only a
  // strictly negative sign breaks positivity.
  result.pass = std::all_of(rows.begin(), rows.end(),
                            [](const KacLevelReport& r) { return r.det_sign >= 0; });
  result.report = kac_report(config.c, config.h, rows, result.pass);
  result.attachments.emplace_back("table.csv", kac_csv(rows));
  return result;
}

SuiteResult run_t2bound(const RunConfig& config) {
  require_virasoro_part(config, "t2bound");
  SuiteResult result{"t2bound", true, false, {}, {}};
  GradedModule mod = build_module(config, config.max_level);
  const BoundReport report = t2_bound_check(mod, config.max_level, config.tolerance);
  result.pass = report.pass;
  result.report = bound_report_json(report);
  result.attachments.emplace_back("margins.csv", margins_csv(report));
  return result;
}

SuiteResult run_oscillator(const RunConfig& config) {
  SuiteResult result{"oscillator", true, false, {}, {}};
  std::vector<CheckRow> rows;
  std::vector<std::string> notes;
  std::ostringstream eig_csv;
  eig_csv << "level,index,eigenvalue\n";

  // Quadratic-sum growth on the Fock space: max eig <= (9/4) n^3 per level.
  const int sug_max = std::min(config.max_level, 10);
  for (int n = 0; n <= sug_max; ++n) {
    const SugawaraFormLevel form = lk_quadratic_form(n);
    const double value = max_form_eigenvalue(form.coords, form.norm_sq);
    const double cube = double(n) * n * n;
    const double bound = 2.25 * cube + config.tolerance * cube;
    rows.push_back({"sugawara_l2_sum_level_" + std::to_string(n), value, bound,
                    config.tolerance, value <= bound});
    std::vector<std::complex<double>> eigs = form_eigenvalues(to_gauss(form.coords), form.norm_sq);
    std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (std::size_t i = 0; i < eigs.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", eigs[i].real());
      eig_csv << n << "," << i << "," << buf << "\n";
    }
  }

  // Deformed battery: central charge detection, eta-independence, and the
  // cubic eigenvalue envelope 5 (c+1) (n+h)^3.
  struct Pair {
    const char* label;
    DeformationParams params;
  };
  const std::vector<Pair> battery = {
      {"k1_e0", {{Rational(1), false}, {Rational(0), false}}},
      {"k1_ei2", {{Rational(1), false}, {rat(1, 2), true}}},
      {"k2_e1", {{Rational(2), false}, {Rational(1), false}}},
  };
  const int def_max = std::min(config.max_level, 8);
  for (const Pair& entry : battery) {
    const Rational c_det = detect_central_charge(entry.params);
    DeformationParams eta_zero = entry.params;
    eta_zero.eta = ExactParameter{};
    const Rational c_again = detect_central_charge(eta_zero);
    rows.push_back({std::string("deformed_") + entry.label + "_c_eta_independent",
                    to_double(c_det), to_double(c_again), 0.0, c_det == c_again});
    notes.push_back(std::string("deformed ") + entry.label + ": c = " + to_string(c_det) +
                    ", h = " + to_string(entry.params.h()));
    const double envelope = 5.0 * (to_double(c_det) + 1.0);
    const double h = to_double(entry.params.h());
    for (int n = 0; n <= def_max; ++n) {
      const DeformedFormLevel form = lk_quadratic_form(n, entry.params);
      double max_abs = 0.0;
      for (const std::complex<double>& ev : form_eigenvalues(form.coords, form.norm_sq))
        max_abs = std::max(max_abs, std::abs(ev));
      const double shifted = double(n) + h;
      const double bound = envelope * shifted * shifted * shifted * (1.0 + config.tolerance);
      rows.push_back({std::string("deformed_") + entry.label + "_level_" + std::to_string(n),
                      max_abs, bound, config.tolerance, max_abs <= bound});
    }
  }

  result.pass = std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
  result.report = check_rows_report("oscillator", result.pass, rows, notes);
  result.attachments.emplace_back("eigenvalues.csv", eig_csv.str());
  return result;
}

SuiteResult run_wbounds(const RunConfig& config) {
  if (config.algebra != AlgebraKind::W3)
    throw ConfigError("suites: wbounds requires the w3 algebra");
  SuiteResult result{"wbounds", true, false, {}, {}};
  const BoundReport report =
      w_optimal_report(config.c, {1, 2, 3}, std::min(config.max_level, 8), config.tolerance);
  result.pass = report.pass;
  result.report = bound_report_json(report);
  result.attachments.emplace_back("margins.csv", margins_csv(report));
  return result;
}

SuiteResult run_circle(const RunConfig& config) {
  SuiteResult result{"circle", true, false, {}, {}};
  std::vector<CheckRow> rows;
  std::vector<std::string> notes;
  const std::size_t grid = std::size_t(config.grid_size);
  const std::size_t steps = std::size_t(config.ode_steps);
  const TestFunction g = TestFunction::constant(Rational(2)) + TestFunction::cosine(1);

  const CircleDiffeo flow = exp_vector_field(g, steps);
  const double residual = flow_residual(flow, g);
  rows.push_back({"flow_residual_2_plus_cos", residual, 1e-6, 1e-6, residual <= 1e-6});

  const double ng = ng_constant(g, grid);
  const double ng_err = std::abs(ng - 1.0 / std::sqrt(3.0));
  rows.push_back({"ng_2_plus_cos_vs_inv_sqrt3", ng_err, 1e-8, 1e-8, ng_err <= 1e-8});

  {
    const CircleDiffeo inner = CircleDiffeo::mobius({0.2, 0.0}, 0.3, grid);
    const TestFunction f = TestFunction::cosine(2) + TestFunction::sine(1);
    const TestFunction via_pair =
        covariance_transform(flow, covariance_transform(inner, f, 3), 3);
    const TestFunction via_composite =
        covariance_transform(flow.composed_with(inner), f, 3);
    const std::vector<std::complex<double>> a = via_pair.samples(grid);
    const std::vector<std::complex<double>> b = via_composite.samples(grid);
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    rows.push_back({"covariance_composition", worst, 1e-6, 1e-6, worst <= 1e-6});
  }

  {
    const CircleDiffeo mob = CircleDiffeo::mobius({0.25, 0.15}, 0.4, grid);
    std::map<int, GaussianRational> coeffs;
    coeffs[-2] = GaussianRational(rat(1, 2), rat(-1, 3));
    coeffs[0] = GaussianRational(Rational(-2));
    coeffs[1] = GaussianRational(Rational(1), Rational(1));
    coeffs[2] = GaussianRational(rat(3, 4));
    const TestFunction span_f = TestFunction::from_coefficients(coeffs);
    const TestFunction image = covariance_transform(mob, span_f, 3);
    double leak = 0.0;
    for (const auto& [n, value] : image.coefficients())
      if (std::abs(n) > 2)
        leak += std::hypot(to_double(value.re), to_double(value.im));
    rows.push_back({"mobius_weight3_span_leak", leak, 1e-8, 1e-8, leak <= 1e-8});
  }

  {
    const CircleDiffeo mob = CircleDiffeo::mobius({0.3, 0.1}, 0.7, grid);
    const double r = std::abs(schwarzian_cocycle(mob, g, to_double(config.c)));
    rows.push_back({"schwarzian_mobius", r, 1e-6, 1e-6, r <= 1e-6});
  }

  if (config.algebra == AlgebraKind::W3) {
    const int cutoff = std::min(config.max_level, 10);
    if (cutoff >= 3) {
      GradedModule mod = build_module(config, cutoff);
      struct Named {
        const char* label;
        TestFunction g;
      };
      const std::vector<Named> fields = {
          {"const", TestFunction::constant(Rational(1))},
          {"one_plus_half_cos",
           TestFunction::constant(Rational(1)) +
               TestFunction::cosine(1).scaled(GaussianRational(rat(1, 2)))},
          {"two_plus_cos", g},
      };
      for (const Named& entry : fields) {
        const WindowCheckReport report = commutator_window_check(
            mod, entry.g * entry.g, entry.g, FieldSpec::w_field(), cutoff, config.tolerance);
        rows.push_back({std::string("window_w_gsq_") + entry.label, report.max_abs_difference,
                        config.tolerance, config.tolerance, report.pass});
      }
    } else {
      notes.push_back("window checks skipped: max_level below 3");
    }
  } else {
    notes.push_back("window checks skipped: vanishing-bracket rows require the w3 algebra");
  }

  result.pass = std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
  result.report = check_rows_report("circle", result.pass, rows, notes);
  result.attachments.emplace_back("flow_lift.csv", lift_csv(flow));
  result.attachments.emplace_back("g_samples.csv", samples_csv(g, grid));
  return result;
}

SuiteResult run_probe(const RunConfig& config) {
  require_virasoro_part(config, "probe");
  SuiteResult result{"probe", false, true, {}, {}};
  GradedModule mod = build_module(config, config.max_level);

  const TestFunction g = TestFunction::constant(Rational(1)) + TestFunction::cosine(1);
  std::vector<int> cutoffs;
  for (int n = 2; n <= config.max_level; n += 2) cutoffs.push_back(n);
  if (cutoffs.empty()) cutoffs.push_back(config.max_level);
  const std::vector<double> mins = t_min_spectrum_sequence(mod, g, cutoffs);

  ProbeReport probe;
  const int probe_cutoff = std::min(config.max_level, 8);
  if (config.algebra == AlgebraKind::W3 && config.h == 0 && config.w == 0 &&
      probe_cutoff >= 6) {
    std::vector<ProbeSample> samples;
    samples.push_back({"vacuum", 0, {1.0}});
    const RatMat coords = mod.mode_matrix(gen_W(-3), 0);
    ProbeSample descendant{"w3_descendant", 3, {}};
    for (std::size_t i = 0; i < coords.rows(); ++i)
      descendant.coords.push_back(to_double(coords.at(i, 0)));
    samples.push_back(std::move(descendant));
    probe = local_bound_probe(mod, TestFunction::constant(Rational(1)), samples, probe_cutoff);
  } else {
    probe.notes.push_back("local bound probe skipped: needs a w3 vacuum module built to >= 6");
  }

  result.report = probe_report(config.c, probe_cutoff, cutoffs, mins, probe);
  std::ostringstream csv;
  csv << "cutoff,t_min\n";
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", mins[i]);
    csv << cutoffs[i] << "," << buf << "\n";
  }
  result.attachments.emplace_back("t_min.csv", csv.str());
  return result;
}

SuiteResult run_build(const RunConfig& config) {
  SuiteResult result{"build", false, true, {}, {}};
  GradedModule mod = build_module(config, config.max_level);
  std::vector<std::string> gram_files;
  for (int n = 0; n <= mod.max_built(); ++n) {
    const std::string name = "gram_L" + std::to_string(n) + ".csv";
    gram_files.push_back("build_" + name);
    result.attachments.emplace_back(name, gram_csv(mod, n));
  }
  result.report = module_report(mod, gram_files);
  return result;
}

// ---------------------------------------------------------------------------
// Runner plumbing
// ---------------------------------------------------------------------------

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> resolve_suites(const RunConfig& config, std::ostream& log) {
  if (!config.suites.empty()) return config.suites;
  std::vector<std::string> selected;
  for (const std::string& name : known_suites()) {
    if (!suite_is_theorem_backed(name)) continue;
    if (name == "wbounds" && config.algebra != AlgebraKind::W3) {
      log << "suite wbounds: skipped (requires the w3 algebra)\n";
      continue;
    }
    if (name == "t2bound" && config.algebra == AlgebraKind::Heisenberg) {
      log << "suite t2bound: skipped (requires a virasoro or w3 module)\n";
      continue;
    }
    selected.push_back(name);
  }
  return selected;
}

Json error_report(const std::string& suite, const std::string& message) {
  Json doc;
  doc["schema_version"] = report_schema_version;
  doc["type"] = "error";
  doc["suite"] = suite;
  doc["message"] = message;
  return doc;
}

}  // namespace

SuiteResult run_one_suite(const std::string& name, const RunConfig& config) {
  if (name == "gram") return run_gram(config);
  if (name == "kac") return run_kac(config);
  if (name == "t2bound") return run_t2bound(config);
  if (name == "oscillator") return run_oscillator(config);
  if (name == "wbounds") return run_wbounds(config);
  if (name == "circle") return run_circle(config);
  if (name == "probe") return run_probe(config);
  if (name == "build") return run_build(config);
  throw ConfigError("suites: unknown suite name '" + name + "'");
}

int run_suites(const RunConfig& config, std::ostream& log) {
  validate_config(config);
  const std::vector<std::string> selected = resolve_suites(config, log);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw ConfigError("out: cannot create directory '" + config.out_dir + "'");
  {
    const fs::path probe_path = fs::path(config.out_dir) / ".write_probe";
    std::ofstream probe_file(probe_path);
    if (!probe_file) throw ConfigError("out: directory '" + config.out_dir + "' is not writable");
    probe_file.close();
    fs::remove(probe_path, ec);
  }

  // Suites run concurrently up to the worker budget; every result (or error)
  // is collected and report writing stays serialized below.
  std::counting_semaphore<> budget(config.workers);
  std::vector<std::future<SuiteResult>> futures;
  futures.reserve(selected.size());
  for (const std::string& name : selected) {
    futures.push_back(std::async(std::launch::async, [&config, &budget, name]() {
      budget.acquire();
      struct Release {
        std::counting_semaphore<>* sem;
        ~Release() { sem->release(); }
      } release{&budget};
      return run_one_suite(name, config);
    }));
  }

  std::vector<SuiteResult> results;
  results.reserve(selected.size());
  for (std::size_t i = 0; i < futures.size(); ++i) {
    try {
      results.push_back(futures[i].get());
    } catch (const std::exception& e) {
      SuiteResult errored;
      errored.name = selected[i];
      errored.theorem_backed = suite_is_theorem_backed(selected[i]);
      errored.pass = false;
      errored.report = error_report(selected[i], e.what());
      results.push_back(std::move(errored));
    }
  }

  const std::string timestamp = iso_timestamp();
  bool all_pass = true;
  Json suites_json = Json::array();
  for (SuiteResult& result : results) {
    Json doc = std::move(result.report);
    doc["timestamp"] = timestamp;
    const std::string file_name = result.name + ".json";
    {
      std::ofstream out(fs::path(config.out_dir) / file_name);
      out << doc.dump(2) << "\n";
    }
    for (const auto& [attachment, content] : result.attachments) {
      std::ofstream out(fs::path(config.out_dir) / (result.name + "_" + attachment));
      out << content;
    }
    if (result.theorem_backed && !result.pass) all_pass = false;
    const bool errored = doc["type"] == "error";
    std::string line;
    if (errored)
      line = "error: " + doc["message"].get<std::string>();
    else if (!result.theorem_backed)
      line = "recorded (informational)";
    else
      line = result.pass ? "pass" : "FAIL";
    log << "suite " << result.name << ": " << line << "\n";
    Json row;
    row["name"] = result.name;
    row["theorem_backed"] = result.theorem_backed;
    row["pass"] = result.pass;
    row["report"] = file_name;
    suites_json.push_back(std::move(row));
  }

  const int status = all_pass ? 0 : 1;
  Json summary;
  summary["schema_version"] = report_schema_version;
  summary["type"] = "summary";
  summary["timestamp"] = timestamp;
  Json echo = Json::object();
  for (const auto& [key, value] : config.echo()) echo[key] = value;
  summary["config"] = std::move(echo);
  summary["suites"] = std::move(suites_json);
  summary["exit_status"] = status;
  {
    std::ofstream out(fs::path(config.out_dir) / "summary.json");
    out << summary.dump(2) << "\n";
  }
  log << "summary: " << (status == 0 ? "all theorem-backed suites passed" : "FAILURES present")
      << "\n";
  return status;
}

}  // namespace walg
