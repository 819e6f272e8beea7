#pragma once

#include <string>
#include <vector>

#include "walg/lowest_weight.hpp"

namespace walg {

// ---------------------------------------------------------------------------
// Norm profiles and bound reports
// ---------------------------------------------------------------------------

// Per-level operator norms of one field mode: gamma[n] is the spectral norm
// of phi_k restricted to the level-n quotient, computed from exact matrices
// and converted to float only at the final eigensolve.  error[n] is a
// backward-stability estimate for that eigensolve (machine epsilon times a
// Gershgorin row-sum bound times the dimension), not a certified enclosure.
struct NormProfile {
  FieldSpec field;
  int k = 0;
  std::vector<double> gamma;
  std::vector<double> error;
};

// One row of a bound check: which inequality instance, at which level, with
// how much slack.  Margins are relative (slack divided by a scale that is at
// least 1), so a nonnegative margin means the inequality holds at that row.
struct MarginRow {
  std::string check;
  int level = 0;
  double margin = 0.0;
};

// Outcome of one inequality suite.  `constant` is the driving constant of
// the inequality (a windowed commutator constant, a fitted constant, or the
// fixed coefficient of the bound); `improved_constant` is the downstream
// constant produced by the improvement step when one applies, else 0.
// `pass` holds if and only if every margin is >= -tolerance.
struct BoundReport {
  std::string inequality;
  Rational c{0};
  Rational h{0};
  int k = 0;
  double beta = 0.0;
  double s = 0.0;
  int d = 0;
  double constant = 0.0;
  double improved_constant = 0.0;
  double tolerance = 1e-9;
  std::vector<MarginRow> margins;
  std::vector<std::string> notes;
  bool pass = false;
};

// Recomputes `pass` from the margins and tolerance.
bool report_passes(const BoundReport& report);

// ---------------------------------------------------------------------------
// Level norms
// ---------------------------------------------------------------------------

// Spectral norm of the operator block from the level-n quotient into the
// level (n + grade) quotient, measured in the Gram inner products of both
// levels.  The normal matrix B^T G_tgt B is formed exactly, reduced by the
// exact LDL factors of the source Gram, and only then diagonalized in
// floats.  Blocks into negative levels have norm 0.
//
// Throws RangeError if a needed level is not built and NegativeFormError if
// a Gram block is indefinite (the norm is undefined there).
struct LevelNormResult {
  double norm = 0.0;
  double error_estimate = 0.0;
};

LevelNormResult level_norm_detailed(GradedModule& mod, const ModePolynomial& p, int n);

double level_norm(GradedModule& mod, const ModePolynomial& p, int n);
double level_norm(GradedModule& mod, GeneratorSymbol g, int n);

// Same norm read off a recorded block family; the block for source level n
// must be present (DomainError otherwise).
double level_norm(GradedModule& mod, const LevelBlockOperator& op, int n);

// Norm of the compression of the block: source restricted to the span of the
// listed quotient-basis indices, target orthogonally projected (in the Gram
// sense) onto the span of its listed indices.  Empty lists mean "all".
// Compressing never increases the norm; tests rely on that monotonicity.
double level_norm_restricted(GradedModule& mod, const ModePolynomial& p, int n,
                             const std::vector<std::size_t>& source_subset,
                             const std::vector<std::size_t>& target_subset);

// gamma[n] = level_norm of the k-mode of the field for n = 0..max_level.
// In a lowest-weight module gamma[n] = 0 for n < k automatically, since the
// target level is then negative.
NormProfile norm_profile(GradedModule& mod, const FieldSpec& field, int k, int max_level);

// ---------------------------------------------------------------------------
// Exact pencil eigensolve
// ---------------------------------------------------------------------------

// Ascending eigenvalues of the pencil (f, G) where the positive definite G is
// given through its exact LDL factors (unit strictly-lower rows and positive
// pivots, the layout of QuotientData::ldl_rows / ldl_diag).  The congruence
// Linv f Linv^T is carried out exactly, scaled by D^{-1/2} in floats and
// diagonalized.  For a self-adjoint operator A on the quotient these are the
// operator eigenvalues when f = G * M with M the basis matrix of A.  err_out,
// if non-null, receives eps * dim * (largest Gershgorin row sum), a
// backward-stability estimate, not a certified enclosure.
std::vector<double> pencil_eigenvalues_ldl(const RatMat& f,
                                           const std::vector<std::vector<Rational>>& lrows,
                                           const std::vector<Rational>& diag,
                                           double* err_out = nullptr);

// ---------------------------------------------------------------------------
// Bound-improvement pipeline
// ---------------------------------------------------------------------------

// C' = sqrt(C / (|k| (beta + 1))): the constant of the single-mode energy
// bound obtained from a commutator bound with constant C.  k = 0 has no
// improvement step and is a DomainError, as are C <= 0 and beta <= 0.
double improve_constant(double c_constant, int k, double beta);

// The majorant chain u(n) = 0 for n < k, u(n+k) = u(n) + C (n+1)^beta,
// evaluated for n = 0..max_level.  Requires k >= 1.
std::vector<double> recursion_majorant(double c_constant, int k, double beta, int max_level);

// Measures C_N = max_{n <= N} ||[phi_{-k}, phi_k]|V_n|| / (n+1)^beta from
// exact commutator matrices, then checks, for n = 0..N:
//   step:        gamma(n+k)^2 <= gamma(n)^2 + C_N (n+1)^beta
//   closed-form: gamma(n)^2   <= C_N / (k (beta+1)) * (n+1)^(beta+1)
//   induction:   the majorant chain driven by C_N stays below the
//                closed-form right-hand side (consistency of the two checks)
// Requires the module built to max_level + k and k >= 1.
BoundReport recursion_verify(GradedModule& mod, const FieldSpec& field, int k, double beta,
                             int max_level, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Quadratic-sum bound check
// ---------------------------------------------------------------------------

// Checks 0 <= :L^2:_0 <= 11(c+1)(1 + L_0^3) as matrix inequalities on every
// level quotient up to max_level, with L_0 = h + n on level n.  Eigenvalues
// come from the exact operator matrix of :L^2:_0 reduced against the exact
// Gram factors.  The report additionally notes whether the stricter
// coefficient 5(c+1) would also pass at every level; that flag never
// affects pass/fail.
BoundReport t2_bound_check(GradedModule& mod, int max_level, double tol = 1e-9);

// ---------------------------------------------------------------------------
// W-field growth report
// ---------------------------------------------------------------------------

// For each k in k_list, computes gamma_k(n) = ||W_k|V_n|| on the vacuum
// module of the spin-3 extension, fits the smallest C with
// gamma_k(n) <= C (n+1)^2 over the window, and reports the windowed growth
// exponent log gamma_k(N) / log(N+1).  The fit margins are nonnegative by
// construction; the exponent must stay below 2 + 0.2.  Data consistent with
// sub-quadratic growth is flagged in the notes but never failed: a finite
// window cannot decide asymptotics.  Requires c >= 2.
BoundReport w_optimal_report(GradedModule& mod, const std::vector<int>& k_list, int max_level,
                             double tol = 1e-9);

// Convenience overload that builds a fresh vacuum module at central charge c.
BoundReport w_optimal_report(const Rational& c, const std::vector<int>& k_list, int max_level,
                             double tol = 1e-9);

}  // namespace walg
