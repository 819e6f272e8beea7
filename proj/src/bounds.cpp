#include "walg/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "walg/eig.hpp"
#include "walg/mode_algebra.hpp"

namespace walg {

namespace {

// ---------------------------------------------------------------------------
// Exact Gram plumbing
// ---------------------------------------------------------------------------

RatMat quotient_gram(GradedModule& mod, int level) {
  const QuotientData& q = mod.radical_quotient(level);
  const RatMat& g = mod.gram_matrix(level);
  RatMat out(q.rank, q.rank);
  for (std::size_t i = 0; i < q.rank; ++i)
    for (std::size_t j = 0; j < q.rank; ++j) out.at(i, j) = g.at(q.selected[i], q.selected[j]);
  return out;
}

struct ExactLdl {
  std::vector<std::vector<Rational>> rows;  // strictly lower triangle, unit diagonal
  std::vector<Rational> diag;
};

ExactLdl ldl_decompose(const RatMat& g) {
  const std::size_t n = g.rows();
  ExactLdl f;
  f.rows.resize(n);
  f.diag.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.rows[i].resize(i);
    for (std::size_t j = 0; j < i; ++j) {
      Rational acc = g.at(i, j);
      for (std::size_t t = 0; t < j; ++t) acc -= f.rows[i][t] * f.rows[j][t] * f.diag[t];
      f.rows[i][j] = acc / f.diag[j];
    }
    Rational d = g.at(i, i);
    for (std::size_t t = 0; t < i; ++t) d -= f.rows[i][t] * f.rows[i][t] * f.diag[t];
    if (!(d > 0)) throw DomainError("ldl_decompose: matrix is not positive definite");
    f.diag[i] = d;
  }
  return f;
}

std::vector<Rational> ldl_solve(const ExactLdl& f, std::vector<Rational> rhs) {
  const std::size_t n = f.diag.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) rhs[i] -= f.rows[i][j] * rhs[j];
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= f.diag[i];
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = i + 1; j < n; ++j) rhs[i] -= f.rows[j][i] * rhs[j];
  return rhs;
}

// S = Linv * m * Linv^T for the unit lower-triangular LDL factor L.  Exact.
RatMat congruence_by_linv(RatMat m, const std::vector<std::vector<Rational>>& lrows) {
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const Rational& lij = lrows[i][j];
      if (lij == 0) continue;
      for (std::size_t col = 0; col < n; ++col) m.at(i, col) -= lij * m.at(j, col);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const Rational& lij = lrows[i][j];
      if (lij == 0) continue;
      for (std::size_t row = 0; row < n; ++row) m.at(row, i) -= lij * m.at(row, j);
    }
  return m;
}

}  // namespace

std::vector<double> pencil_eigenvalues_ldl(const RatMat& f,
                                           const std::vector<std::vector<Rational>>& lrows,
                                           const std::vector<Rational>& diag, double* err_out) {
  const std::size_t r = diag.size();
  if (err_out) *err_out = 0.0;
  if (r == 0) return {};
  const RatMat s = congruence_by_linv(f, lrows);
  std::vector<double> root(r);
  for (std::size_t i = 0; i < r; ++i) root[i] = std::sqrt(to_double(diag[i]));
  std::vector<double> m(r * r);
  double worst = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      m[i * r + j] = to_double(s.at(i, j)) / (root[i] * root[j]);
      row_sum += std::abs(m[i * r + j]);
    }
    worst = std::max(worst, row_sum);
  }
  if (err_out) *err_out = std::numeric_limits<double>::epsilon() * double(r) * worst;
  return sym_eigenvalues(m, r);
}

namespace {

LevelNormResult norm_from_block(GradedModule& mod, const RatMat& b, int src_level,
                                int tgt_level) {
  if (b.rows() == 0 || b.cols() == 0) return {};
  const RatMat g_tgt = quotient_gram(mod, tgt_level);
  const RatMat normal = b.transpose() * (g_tgt * b);
  const QuotientData& q_src = mod.radical_quotient(src_level);
  double err = 0.0;
  const std::vector<double> eig = pencil_eigenvalues_ldl(normal, q_src.ldl_rows, q_src.ldl_diag, &err);
  const double lam = eig.empty() ? 0.0 : eig.back();
  LevelNormResult out;
  out.norm = lam > 0 ? std::sqrt(lam) : 0.0;
  out.error_estimate = (lam > err && lam > 0) ? err / (2 * std::sqrt(lam)) : std::sqrt(std::max(err, 0.0));
  return out;
}

int homogeneous_grade(const ModePolynomial& p) {
  const int grade = p.terms().begin()->first.level();
  for (const auto& [word, coeff] : p.terms()) {
    (void)coeff;
    if (word.level() != grade)
      throw DomainError("level_norm: polynomial must be homogeneous in grade");
  }
  return grade;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

bool report_passes(const BoundReport& report) {
  for (const MarginRow& row : report.margins)
    if (!(row.margin >= -report.tolerance)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Level norms
// ---------------------------------------------------------------------------

LevelNormResult level_norm_detailed(GradedModule& mod, const ModePolynomial& p, int n) {
  if (p.is_zero()) return {};
  const int target = n + homogeneous_grade(p);
  if (target < 0) return {};
  const RatMat b = mod.mode_matrix(p, n);
  return norm_from_block(mod, b, n, target);
}

double level_norm(GradedModule& mod, const ModePolynomial& p, int n) {
  return level_norm_detailed(mod, p, n).norm;
}

double level_norm(GradedModule& mod, GeneratorSymbol g, int n) {
  return level_norm_detailed(mod, ModePolynomial::generator(g), n).norm;
}

double level_norm(GradedModule& mod, const LevelBlockOperator& op, int n) {
  const auto it = op.blocks.find(n);
  if (it == op.blocks.end())
    throw DomainError("level_norm: no block recorded for source level " + std::to_string(n));
  const int target = n + op.grade;
  if (target < 0) return 0.0;
  return norm_from_block(mod, it->second, n, target).norm;
}

double level_norm_restricted(GradedModule& mod, const ModePolynomial& p, int n,
                             const std::vector<std::size_t>& source_subset,
                             const std::vector<std::size_t>& target_subset) {
  if (p.is_zero()) return 0.0;
  const int target = n + homogeneous_grade(p);
  if (target < 0) return 0.0;
  const RatMat b = mod.mode_matrix(p, n);
  if (b.rows() == 0 || b.cols() == 0) return 0.0;

  const auto expand = [](const std::vector<std::size_t>& subset, std::size_t full) {
    std::vector<std::size_t> out;
    if (subset.empty()) {
      out.resize(full);
      std::iota(out.begin(), out.end(), std::size_t{0});
      return out;
    }
    out = subset;
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end() || out.back() >= full)
      throw DomainError("level_norm_restricted: invalid basis subset");
    return out;
  };
  const std::vector<std::size_t> src = expand(source_subset, b.cols());
  const std::vector<std::size_t> tgt = expand(target_subset, b.rows());

  const RatMat g_src_full = quotient_gram(mod, n);
  const RatMat g_tgt_full = quotient_gram(mod, target);

  RatMat b_s(b.rows(), src.size());
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t jj = 0; jj < src.size(); ++jj) b_s.at(i, jj) = b.at(i, src[jj]);

  // Rows of G_tgt * B_s at the kept target indices: the pairing of the image
  // with the kept target vectors.
  const RatMat gb = g_tgt_full * b_s;
  RatMat c(tgt.size(), src.size());
  for (std::size_t ii = 0; ii < tgt.size(); ++ii)
    for (std::size_t jj = 0; jj < src.size(); ++jj) c.at(ii, jj) = gb.at(tgt[ii], jj);

  RatMat g_t(tgt.size(), tgt.size());
  for (std::size_t ii = 0; ii < tgt.size(); ++ii)
    for (std::size_t jj = 0; jj < tgt.size(); ++jj)
      g_t.at(ii, jj) = g_tgt_full.at(tgt[ii], tgt[jj]);
  const ExactLdl f_t = ldl_decompose(g_t);

  // x = G_t^{-1} c column by column; normal = c^T x is the Gram projection
  // of the image onto the kept target span, paired with itself.
  RatMat x(tgt.size(), src.size());
  for (std::size_t jj = 0; jj < src.size(); ++jj) {
    std::vector<Rational> col(tgt.size());
    for (std::size_t ii = 0; ii < tgt.size(); ++ii) col[ii] = c.at(ii, jj);
    col = ldl_solve(f_t, std::move(col));
    for (std::size_t ii = 0; ii < tgt.size(); ++ii) x.at(ii, jj) = col[ii];
  }
  const RatMat normal = c.transpose() * x;

  RatMat g_s(src.size(), src.size());
  for (std::size_t ii = 0; ii < src.size(); ++ii)
    for (std::size_t jj = 0; jj < src.size(); ++jj)
      g_s.at(ii, jj) = g_src_full.at(src[ii], src[jj]);
  const ExactLdl f_s = ldl_decompose(g_s);

  const std::vector<double> eig = pencil_eigenvalues_ldl(normal, f_s.rows, f_s.diag, nullptr);
  const double lam = eig.empty() ? 0.0 : eig.back();
  return lam > 0 ? std::sqrt(lam) : 0.0;
}

NormProfile norm_profile(GradedModule& mod, const FieldSpec& field, int k, int max_level) {
  if (max_level < 0) throw DomainError("norm_profile: max_level must be >= 0");
  NormProfile out;
  out.field = field;
  out.k = k;
  out.gamma.resize(std::size_t(max_level) + 1);
  out.error.resize(std::size_t(max_level) + 1);
  const ModePolynomial mode = ModePolynomial::generator(GeneratorSymbol{field.family, k});
  for (int n = 0; n <= max_level; ++n) {
    const LevelNormResult r = level_norm_detailed(mod, mode, n);
    out.gamma[std::size_t(n)] = r.norm;
    out.error[std::size_t(n)] = r.error_estimate;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bound-improvement pipeline
// ---------------------------------------------------------------------------

double improve_constant(double c_constant, int k, double beta) {
  if (k == 0) throw DomainError("improve_constant: k must be nonzero");
  if (!(c_constant > 0)) throw DomainError("improve_constant: C must be positive");
  if (!(beta > 0)) throw DomainError("improve_constant: beta must be positive");
  return std::sqrt(c_constant / (std::abs(k) * (beta + 1)));
}

std::vector<double> recursion_majorant(double c_constant, int k, double beta, int max_level) {
  if (k < 1) throw DomainError("recursion_majorant: k must be >= 1");
  if (max_level < 0) throw DomainError("recursion_majorant: max_level must be >= 0");
  std::vector<double> u(std::size_t(max_level) + 1, 0.0);
  for (int n = 0; n + k <= max_level; ++n)
    u[std::size_t(n + k)] = u[std::size_t(n)] + c_constant * std::pow(n + 1.0, beta);
  return u;
}

BoundReport recursion_verify(GradedModule& mod, const FieldSpec& field, int k, double beta,
                             int max_level, double tol) {
  if (k < 1) throw DomainError("recursion_verify: k must be >= 1");
  if (!(beta > 0)) throw DomainError("recursion_verify: beta must be positive");
  if (max_level < 0) throw DomainError("recursion_verify: max_level must be >= 0");
  if (mod.max_built() < max_level + k)
    throw RangeError("recursion_verify: module must be built to max_level + k");

  BoundReport rep;
  rep.inequality = "commutator-recursion";
  rep.c = mod.algebra().c;
  rep.h = mod.lowest_h();
  rep.k = k;
  rep.beta = beta;
  rep.s = (beta + 1) / 2;
  rep.d = field.conformal_dimension;
  rep.tolerance = tol;

  const GeneratorSymbol lowering{field.family, k};
  const GeneratorSymbol raising{field.family, -k};
  const ModePolynomial comm = commutator(raising, lowering, mod.algebra());

  double c_n = 0.0;
  for (int n = 0; n <= max_level; ++n) {
    const double nrm = level_norm_detailed(mod, comm, n).norm;
    c_n = std::max(c_n, nrm / std::pow(n + 1.0, beta));
  }
  rep.constant = c_n;
  rep.improved_constant = c_n > 0 ? improve_constant(c_n, k, beta) : 0.0;

  const NormProfile prof = norm_profile(mod, field, k, max_level + k);
  const double closed_coef = c_n / (k * (beta + 1));
  const std::vector<double> major = recursion_majorant(c_n, k, beta, max_level);
  for (int n = 0; n <= max_level; ++n) {
    const double g_n = prof.gamma[std::size_t(n)];
    const double g_nk = prof.gamma[std::size_t(n + k)];
    const double step_rhs = g_n * g_n + c_n * std::pow(n + 1.0, beta);
    rep.margins.push_back({"step", n, (step_rhs - g_nk * g_nk) / std::max(1.0, step_rhs)});
    const double closed_rhs = closed_coef * std::pow(n + 1.0, beta + 1);
    rep.margins.push_back(
        {"closed-form", n, (closed_rhs - g_n * g_n) / std::max(1.0, closed_rhs)});
    rep.margins.push_back(
        {"induction", n, (closed_rhs - major[std::size_t(n)]) / std::max(1.0, closed_rhs)});
  }
  rep.notes.push_back("C_N measured from exact commutator blocks over levels 0.." +
                      std::to_string(max_level));
  rep.pass = report_passes(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Quadratic-sum bound check
// ---------------------------------------------------------------------------

BoundReport t2_bound_check(GradedModule& mod, int max_level, double tol) {
  if (max_level < 0) throw DomainError("t2_bound_check: max_level must be >= 0");
  if (mod.max_built() < max_level)
    throw RangeError("t2_bound_check: module must be built to max_level");

  BoundReport rep;
  rep.inequality = "wick-square-energy-bound";
  rep.c = mod.algebra().c;
  rep.h = mod.lowest_h();
  rep.d = 2;
  rep.tolerance = tol;
  const Rational proven_coef = Rational(11) * (rep.c + 1);
  const Rational strict_coef = Rational(5) * (rep.c + 1);
  rep.constant = to_double(proven_coef);

  const ModePolynomial wick0 = wick_square_L(0);
  bool strict_ok = true;
  int strict_fail_level = -1;
  double strict_fail_excess = 0.0;
  for (int n = 0; n <= max_level; ++n) {
    const QuotientData& q = mod.radical_quotient(n);
    if (q.rank == 0) {
      rep.notes.push_back("level " + std::to_string(n) + ": empty quotient, vacuous");
      continue;
    }
    const RatMat m = mod.mode_matrix(wick0, n);
    const RatMat g = quotient_gram(mod, n);
    const RatMat form = g * m;
    for (std::size_t i = 0; i < form.rows(); ++i)
      for (std::size_t j = i + 1; j < form.cols(); ++j)
        if (form.at(i, j) != form.at(j, i))
          throw DomainError("t2_bound_check: quadratic-sum block is not self-adjoint");
    double err = 0.0;
    const std::vector<double> eig = pencil_eigenvalues_ldl(form, q.ldl_rows, q.ldl_diag, &err);
    const double lam_min = eig.front();
    const double lam_max = eig.back();
    const Rational hn = rep.h + n;
    const Rational shape = 1 + hn * hn * hn;
    const double bound = to_double(proven_coef * shape);
    const double strict = to_double(strict_coef * shape);
    const double scale = std::max(1.0, bound);
    rep.margins.push_back({"psd", n, lam_min / scale});
    rep.margins.push_back({"upper", n, (bound - lam_max) / scale});
    if (strict_ok && !(lam_max <= strict + tol * std::max(1.0, strict))) {
      strict_ok = false;
      strict_fail_level = n;
      strict_fail_excess = lam_max - strict;
    }
  }
  if (strict_ok) {
    rep.notes.push_back("stricter coefficient 5(c+1) also passes at every checked level");
  } else {
    rep.notes.push_back("stricter coefficient 5(c+1) first fails at level " +
                        std::to_string(strict_fail_level) + " (excess " +
                        format_double(strict_fail_excess) + "); the checked coefficient is 11(c+1)");
  }
  rep.pass = report_passes(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// W-field growth report
// ---------------------------------------------------------------------------

BoundReport w_optimal_report(GradedModule& mod, const std::vector<int>& k_list, int max_level,
                             double tol) {
  if (mod.algebra().kind != AlgebraKind::W3)
    throw DomainError("w_optimal_report: spin-3 vacuum module required");
  if (mod.lowest_h() != 0 || mod.lowest_w() != 0)
    throw DomainError("w_optimal_report: vacuum module required");
  if (mod.algebra().c < 2) throw DomainError("w_optimal_report: requires c >= 2");
  if (max_level < 0) throw DomainError("w_optimal_report: max_level must be >= 0");
  if (mod.max_built() < max_level)
    throw RangeError("w_optimal_report: module must be built to max_level");

  BoundReport rep;
  rep.inequality = "w-field-quadratic-energy-bound";
  rep.c = mod.algebra().c;
  rep.h = Rational(0);
  rep.beta = 3;
  rep.s = 2;
  rep.d = 3;
  rep.tolerance = tol;

  const double exponent_cap = 2.2;
  double fitted_max = 0.0;
  for (const int k : k_list) {
    if (k < 0) throw DomainError("w_optimal_report: k must be >= 0");
    const NormProfile prof = norm_profile(mod, FieldSpec::w_field(), k, max_level);
    double fit = 0.0;
    for (int n = 0; n <= max_level; ++n)
      fit = std::max(fit, prof.gamma[std::size_t(n)] / std::pow(n + 1.0, 2));
    fitted_max = std::max(fitted_max, fit);
    const std::string tag = "[k=" + std::to_string(k) + "]";
    for (int n = 0; n <= max_level; ++n) {
      const double rhs = fit * std::pow(n + 1.0, 2);
      rep.margins.push_back(
          {"fit" + tag, n, (rhs - prof.gamma[std::size_t(n)]) / std::max(1.0, rhs)});
    }
    const double tail = prof.gamma[std::size_t(max_level)];
    if (tail > 0.0 && max_level >= 1) {
      const double exponent = std::log(tail) / std::log(max_level + 1.0);
      rep.margins.push_back({"exponent" + tag, max_level, (exponent_cap - exponent) / exponent_cap});
      rep.notes.push_back("k=" + std::to_string(k) + ": fitted C = " + format_double(fit) +
                          ", windowed exponent = " + format_double(exponent));
      if (exponent < 2.0)
        rep.notes.push_back("k=" + std::to_string(k) +
                            ": window is also consistent with sub-quadratic growth; a finite "
                            "window cannot decide asymptotics");
    } else {
      rep.notes.push_back("k=" + std::to_string(k) + ": fitted C = " + format_double(fit) +
                          ", no growth exponent (zero norm at the window end)");
    }
  }
  rep.constant = fitted_max;
  rep.pass = report_passes(rep);
  return rep;
}

BoundReport w_optimal_report(const Rational& c, const std::vector<int>& k_list, int max_level,
                             double tol) {
  GradedModule mod(AlgebraSpec::w3(c));
  mod.build_to(max_level);
  return w_optimal_report(mod, k_list, max_level, tol);
}

}  // namespace walg
