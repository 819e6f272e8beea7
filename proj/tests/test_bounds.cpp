#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "walg/bounds.hpp"
#include "walg/eig.hpp"
#include "walg/lowest_weight.hpp"
#include "walg/mode_algebra.hpp"
#include "walg/rational.hpp"

using namespace walg;

namespace {

// Shared modules, built once.  Heights cover the deepest test in this file.
GradedModule& vir_c2() {
  static GradedModule mod(AlgebraSpec::virasoro(rat(2)));
  static const bool built = (mod.build_to(12), true);
  (void)built;
  return mod;
}

GradedModule& vir_c25_h3() {
  static GradedModule mod(AlgebraSpec::virasoro(rat(25)), rat(3));
  static const bool built = (mod.build_to(6), true);
  (void)built;
  return mod;
}

GradedModule& vir_c3_h_half() {
  static GradedModule mod(AlgebraSpec::virasoro(rat(3)), rat(1, 2));
  static const bool built = (mod.build_to(8), true);
  (void)built;
  return mod;
}

GradedModule& w3_c3() {
  static GradedModule mod(AlgebraSpec::w3(rat(3)));
  static const bool built = (mod.build_to(9), true);
  (void)built;
  return mod;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

const MarginRow* find_margin(const BoundReport& rep, const std::string& check, int level) {
  for (const MarginRow& row : rep.margins)
    if (row.check == check && row.level == level) return &row;
  return nullptr;
}

bool notes_mention(const BoundReport& rep, const std::string& needle) {
  for (const std::string& note : rep.notes)
    if (note.find(needle) != std::string::npos) return true;
  return false;
}

// Quotient Gram block rebuilt through the public interface, for oracle
// recomputations of norms along an independent float route.
RatMat quotient_gram_public(GradedModule& mod, int level) {
  const QuotientData& q = mod.radical_quotient(level);
  const RatMat& g = mod.gram_matrix(level);
  RatMat out(q.rank, q.rank);
  for (std::size_t i = 0; i < q.rank; ++i)
    for (std::size_t j = 0; j < q.rank; ++j) out.at(i, j) = g.at(q.selected[i], q.selected[j]);
  return out;
}

double norm_via_float_cholesky(GradedModule& mod, GeneratorSymbol g, int n) {
  const int target = n + g.grade();
  if (target < 0) return 0.0;
  const RatMat b = mod.mode_matrix(g, n);
  if (b.rows() == 0 || b.cols() == 0) return 0.0;
  const RatMat normal = b.transpose() * (quotient_gram_public(mod, target) * b);
  const std::vector<double> eig = generalized_sym_eigenvalues(normal, quotient_gram_public(mod, n));
  const double lam = eig.empty() ? 0.0 : eig.back();
  return lam > 0 ? std::sqrt(lam) : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constant improvement
// ---------------------------------------------------------------------------

TEST_CASE("improve_constant matches the closed formula") {
  CHECK(improve_constant(12.0, 2, 3.0) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
  CHECK(improve_constant(8.0, 1, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(improve_constant(5.0, 5, 0.25) == doctest::Approx(std::sqrt(0.8)).epsilon(1e-15));
  CHECK(improve_constant(5.0, 5, 0.25) == doctest::Approx(0.894427190999916).epsilon(1e-12));
  // Negative modes improve with |k|, matching the adjoint reduction.
  CHECK(improve_constant(8.0, -1, 1.0) == doctest::Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(improve_constant(8.0, 0, 1.0), DomainError);
  CHECK_THROWS_AS(improve_constant(0.0, 1, 1.0), DomainError);
  CHECK_THROWS_AS(improve_constant(-3.0, 1, 1.0), DomainError);
  CHECK_THROWS_AS(improve_constant(8.0, 1, 0.0), DomainError);
  CHECK_THROWS_AS(improve_constant(8.0, 1, -0.5), DomainError);
}

TEST_CASE("recursion majorant chain and its closed-form ceiling") {
  // k = 1, beta = 1, C = 2: u(n) = n(n+1), ceiling (n+1)^2.
  const std::vector<double> u = recursion_majorant(2.0, 1, 1.0, 6);
  for (int n = 0; n <= 6; ++n) {
    CHECK(u[std::size_t(n)] == doctest::Approx(double(n) * (n + 1)).epsilon(1e-14));
    CHECK(u[std::size_t(n)] <= (n + 1.0) * (n + 1.0) + 1e-12);
  }
  // k = 2 seeds two zero levels.
  const std::vector<double> v = recursion_majorant(5.0, 2, 3.0, 5);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == doctest::Approx(5.0));
  CHECK(v[3] == doctest::Approx(5.0 * 8.0));
  CHECK(v[4] == doctest::Approx(5.0 + 5.0 * 27.0));

  CHECK_THROWS_AS(recursion_majorant(1.0, 0, 1.0, 4), DomainError);
}

TEST_CASE("majorant chain stays below the closed form for varied parameters") {
  const struct {
    double c;
    int k;
    double beta;
  } cases[] = {{2.0, 1, 1.0}, {5.0, 2, 3.0}, {1.0, 3, 0.5}, {7.0, 1, 3.0}, {0.3, 4, 2.0}};
  for (const auto& cs : cases) {
    const std::vector<double> u = recursion_majorant(cs.c, cs.k, cs.beta, 12);
    const double coef = cs.c / (cs.k * (cs.beta + 1));
    for (int n = 0; n <= 12; ++n) {
      const double ceiling = coef * std::pow(n + 1.0, cs.beta + 1);
      CHECK(u[std::size_t(n)] <= ceiling * (1 + 1e-12) + 1e-12);
    }
  }
}

// ---------------------------------------------------------------------------
// Level norms
// ---------------------------------------------------------------------------

TEST_CASE("level norm of the grading mode is the level") {
  GradedModule& mod = vir_c2();
  for (int n = 0; n <= 8; ++n) {
    if (n == 1) continue;  // vacuum quotient is empty at level 1
    CHECK(close_rel(level_norm(mod, gen_L(0), n), double(n), 1e-9));
  }
  CHECK(level_norm(mod, gen_L(0), 1) == 0.0);

  GradedModule& shifted = vir_c25_h3();
  for (int n = 0; n <= 6; ++n)
    CHECK(close_rel(level_norm(shifted, gen_L(0), n), 3.0 + n, 1e-9));
}

TEST_CASE("level norm of the cubic mode at its lowest reachable level") {
  GradedModule& mod = w3_c3();
  CHECK(level_norm(mod, gen_W(3), 3) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stress-energy modes satisfy the linear energy bound") {
  GradedModule& mod = vir_c2();
  const double root = std::sqrt(1.0 + 2.0 / 12.0);
  for (int n = -4; n <= 4; ++n)
    for (int m = 0; m <= 8; ++m) {
      const double bound = root * (1.0 + std::pow(std::abs(n), 1.5)) * (1.0 + m);
      CHECK(level_norm(mod, gen_L(n), m) <= bound * (1 + 1e-9) + 1e-12);
    }
}

TEST_CASE("level norms agree with an independent float-Cholesky route") {
  GradedModule& vir = vir_c2();
  GradedModule& w3 = w3_c3();
  for (int n = 0; n <= 8; ++n) {
    CHECK(close_rel(level_norm(vir, gen_L(2), n), norm_via_float_cholesky(vir, gen_L(2), n), 1e-8));
    CHECK(close_rel(level_norm(vir, gen_L(-1), n), norm_via_float_cholesky(vir, gen_L(-1), n),
                    1e-8));
    CHECK(close_rel(level_norm(w3, gen_W(1), n), norm_via_float_cholesky(w3, gen_W(1), n), 1e-8));
  }
}

TEST_CASE("block-family norms match direct computation and reject missing blocks") {
  GradedModule& mod = vir_c2();
  const LevelBlockOperator op = block_operator(mod, gen_L(2), 2, 8);
  for (int n = 2; n <= 8; ++n)
    CHECK(close_rel(level_norm(mod, op, n), level_norm(mod, gen_L(2), n), 1e-12));
  CHECK_THROWS_AS(level_norm(mod, op, 1), DomainError);
  CHECK_THROWS_AS(level_norm(mod, op, 9), DomainError);
}

TEST_CASE("adjoint modes have equal norms across the level shift") {
  GradedModule& vir = vir_c2();
  for (int k = 1; k <= 3; ++k)
    for (int n = 0; n <= 6; ++n) {
      const double down = level_norm(vir, gen_L(k), n + k);
      const double up = level_norm(vir, gen_L(-k), n);
      CHECK(close_rel(down, up, 1e-10));
    }
  GradedModule& w3 = w3_c3();
  for (int k = 1; k <= 3; ++k)
    for (int n = 0; n <= 5; ++n) {
      const double down = level_norm(w3, gen_W(k), n + k);
      const double up = level_norm(w3, gen_W(-k), n);
      CHECK(close_rel(down, up, 1e-10));
    }
}

TEST_CASE("compression to basis subsets never increases the norm") {
  GradedModule& mod = vir_c2();
  const ModePolynomial l2 = ModePolynomial::generator(gen_L(2));
  const double full = level_norm(mod, l2, 6);
  const double full_again = level_norm_restricted(mod, l2, 6, {}, {});
  CHECK(close_rel(full, full_again, 1e-12));

  const std::vector<std::vector<std::size_t>> source_subsets = {{0}, {1}, {0, 1}, {0, 2}, {1, 2}};
  const std::vector<std::vector<std::size_t>> target_subsets = {{}, {0}, {0, 1}};
  for (const auto& src : source_subsets)
    for (const auto& tgt : target_subsets) {
      const double restricted = level_norm_restricted(mod, l2, 6, src, tgt);
      CHECK(restricted <= full * (1 + 1e-12) + 1e-12);
    }

  GradedModule& w3 = w3_c3();
  const ModePolynomial w1 = ModePolynomial::generator(gen_W(1));
  const double wfull = level_norm(w3, w1, 5);
  CHECK(level_norm_restricted(w3, w1, 5, {0, 1}, {}) <= wfull * (1 + 1e-12) + 1e-12);
  CHECK(level_norm_restricted(w3, w1, 5, {}, {0}) <= wfull * (1 + 1e-12) + 1e-12);

  CHECK_THROWS_AS(level_norm_restricted(mod, l2, 6, {0, 0}, {}), DomainError);
  CHECK_THROWS_AS(level_norm_restricted(mod, l2, 6, {99}, {}), DomainError);
}

TEST_CASE("norm profiles vanish below the mode index") {
  NormProfile wp = norm_profile(w3_c3(), FieldSpec::w_field(), 3, 6);
  CHECK(wp.gamma[0] == 0.0);
  CHECK(wp.gamma[1] == 0.0);
  CHECK(wp.gamma[2] == 0.0);
  CHECK(wp.gamma[3] == doctest::Approx(1.0).epsilon(1e-9));

  NormProfile lp = norm_profile(vir_c2(), FieldSpec::stress_energy(), 2, 6);
  CHECK(lp.gamma[0] == 0.0);
  CHECK(lp.gamma[1] == 0.0);
  CHECK(lp.gamma[2] == doctest::Approx(1.0).epsilon(1e-9));
}

// ---------------------------------------------------------------------------
// Commutator recursion
// ---------------------------------------------------------------------------

TEST_CASE("recursion holds for the spin-3 field at its lowest mode") {
  BoundReport rep = recursion_verify(w3_c3(), FieldSpec::w_field(), 1, 3.0, 8);
  CHECK(rep.pass);
  CHECK(report_passes(rep));
  CHECK(rep.constant > 0.0);
  CHECK(rep.improved_constant ==
        doctest::Approx(std::sqrt(rep.constant / 4.0)).epsilon(1e-12));
  CHECK(rep.c == rat(3));
  CHECK(rep.k == 1);
  CHECK(rep.s == doctest::Approx(2.0));
  CHECK(rep.d == 3);
  REQUIRE(find_margin(rep, "step", 8) != nullptr);
  REQUIRE(find_margin(rep, "closed-form", 8) != nullptr);
  REQUIRE(find_margin(rep, "induction", 8) != nullptr);
  for (const MarginRow& row : rep.margins) CHECK(row.margin >= -1e-9);
}

TEST_CASE("recursion constant for the stress-energy field is frozen") {
  BoundReport rep = recursion_verify(vir_c2(), FieldSpec::stress_energy(), 1, 1.0, 8);
  CHECK(rep.pass);
  // The commutator of the two nearest modes acts as 2 L_0, whose norm on the
  // level-n quotient is 2n; the windowed constant is attained at n = 8.
  CHECK(rep.constant == doctest::Approx(16.0 / 9.0).epsilon(1e-9));
  CHECK(rep.improved_constant == doctest::Approx(std::sqrt(8.0 / 9.0)).epsilon(1e-9));
}

TEST_CASE("recursion rejects bad parameters and shallow builds") {
  CHECK_THROWS_AS(recursion_verify(vir_c2(), FieldSpec::stress_energy(), 0, 1.0, 4), DomainError);
  CHECK_THROWS_AS(recursion_verify(vir_c2(), FieldSpec::stress_energy(), 1, 0.0, 4), DomainError);
  CHECK_THROWS_AS(recursion_verify(vir_c2(), FieldSpec::stress_energy(), 1, 1.0, 12), RangeError);
}

// ---------------------------------------------------------------------------
// Quadratic-sum bound
// ---------------------------------------------------------------------------

TEST_CASE("quadratic sum at the lowest level is 2h + h^2") {
  const ModePolynomial wick0 = wick_square_L(0);
  RatMat at_vacuum = vir_c2().mode_matrix(wick0, 0);
  REQUIRE(at_vacuum.rows() == 1);
  CHECK(at_vacuum.at(0, 0) == rat(0));

  RatMat at_half = vir_c3_h_half().mode_matrix(wick0, 0);
  REQUIRE(at_half.rows() == 1);
  CHECK(at_half.at(0, 0) == rat(5, 4));
}

TEST_CASE("quadratic sum equals its normal-ordered expansion as matrices") {
  const ModePolynomial wick0 = wick_square_L(0);
  for (GradedModule* mod : {&vir_c2(), &vir_c3_h_half()}) {
    for (int n = 0; n <= 6; ++n) {
      ModePolynomial expanded = ModePolynomial::generator(gen_L(0), rat(2));
      expanded.add_term(ModeWord({gen_L(0), gen_L(0)}), rat(1));
      for (int k = 1; k <= n; ++k)
        expanded.add_term(ModeWord({gen_L(-k), gen_L(k)}), rat(2));
      CHECK(mod->mode_matrix(wick0, n) == mod->mode_matrix(expanded, n));
    }
  }
}

TEST_CASE("quadratic-sum bound holds on vacuum modules") {
  for (int c : {1, 2, 7}) {
    GradedModule mod(AlgebraSpec::virasoro(rat(c)));
    mod.build_to(8);
    BoundReport rep = t2_bound_check(mod, 8);
    CHECK(rep.pass);
    CHECK(rep.constant == doctest::Approx(11.0 * (c + 1)).epsilon(1e-12));
    CHECK(notes_mention(rep, "5(c+1)"));
    for (const MarginRow& row : rep.margins) CHECK(row.margin >= -1e-9);
  }
}

TEST_CASE("quadratic-sum bound holds with shifted grading") {
  BoundReport rep = t2_bound_check(vir_c3_h_half(), 8);
  CHECK(rep.pass);
  const MarginRow* upper0 = find_margin(rep, "upper", 0);
  REQUIRE(upper0 != nullptr);
  // Level 0 eigenvalue 5/4 against 11(c+1)(1 + (1/2)^3) = 49.5.
  CHECK(upper0->margin == doctest::Approx((49.5 - 1.25) / 49.5).epsilon(1e-9));
  const MarginRow* psd0 = find_margin(rep, "psd", 0);
  REQUIRE(psd0 != nullptr);
  CHECK(psd0->margin == doctest::Approx(1.25 / 49.5).epsilon(1e-9));
}

TEST_CASE("quadratic-sum bound runs inside the spin-3 vacuum") {
  BoundReport rep = t2_bound_check(w3_c3(), 6);
  CHECK(rep.pass);
  CHECK(notes_mention(rep, "level 1: empty quotient"));
}

TEST_CASE("quadratic-sum bound rejects shallow builds") {
  GradedModule mod(AlgebraSpec::virasoro(rat(2)));
  mod.build_to(2);
  CHECK_THROWS_AS(t2_bound_check(mod, 5), RangeError);
}

// ---------------------------------------------------------------------------
// W-field growth report
// ---------------------------------------------------------------------------

TEST_CASE("w growth report fits a quadratic envelope at c = 3") {
  BoundReport rep = w_optimal_report(w3_c3(), {1}, 8);
  CHECK(rep.pass);
  CHECK(rep.constant > 0.0);
  CHECK(rep.s == doctest::Approx(2.0));
  CHECK(rep.d == 3);
  REQUIRE(find_margin(rep, "exponent[k=1]", 8) != nullptr);
  CHECK(find_margin(rep, "exponent[k=1]", 8)->margin >= -1e-9);
  CHECK(notes_mention(rep, "fitted C"));
  for (int n = 0; n <= 8; ++n) {
    const MarginRow* row = find_margin(rep, "fit[k=1]", n);
    REQUIRE(row != nullptr);
    CHECK(row->margin >= -1e-12);
  }
}

TEST_CASE("w growth report at the boundary charge") {
  BoundReport rep = w_optimal_report(rat(2), {2}, 8);
  CHECK(rep.pass);
  CHECK(rep.c == rat(2));
  CHECK(notes_mention(rep, "fitted C"));
}

TEST_CASE("zero mode of the spin-3 field vanishes on low levels") {
  NormProfile prof = norm_profile(w3_c3(), FieldSpec::w_field(), 0, 2);
  CHECK(prof.gamma[0] == 0.0);
  CHECK(prof.gamma[1] == 0.0);
  CHECK(prof.gamma[2] == 0.0);

  BoundReport rep = w_optimal_report(w3_c3(), {0}, 2);
  CHECK(rep.pass);
  CHECK(rep.constant == 0.0);
  CHECK(notes_mention(rep, "no growth exponent"));
}

TEST_CASE("w growth report rejects out-of-scope modules") {
  CHECK_THROWS_AS(w_optimal_report(rat(3, 2), {1}, 4), DomainError);
  CHECK_THROWS_AS(w_optimal_report(vir_c2(), {1}, 4), DomainError);
  GradedModule excited(AlgebraSpec::w3(rat(3)), rat(1));
  excited.build_to(2);
  CHECK_THROWS_AS(w_optimal_report(excited, {1}, 2), DomainError);
  CHECK_THROWS_AS(w_optimal_report(w3_c3(), {-1}, 2), DomainError);
}

// ---------------------------------------------------------------------------
// Report plumbing
// ---------------------------------------------------------------------------

TEST_CASE("report passes exactly when every margin clears the tolerance") {
  BoundReport rep;
  rep.tolerance = 1e-9;
  rep.margins = {{"a", 0, 0.5}, {"b", 1, -1e-12}};
  CHECK(report_passes(rep));
  rep.margins.push_back({"c", 2, -1e-3});
  CHECK(!report_passes(rep));
  rep.margins = {{"d", 0, std::numeric_limits<double>::quiet_NaN()}};
  CHECK(!report_passes(rep));
}
