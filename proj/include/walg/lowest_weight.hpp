#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "walg/errors.hpp"
#include "walg/exact_mat.hpp"
#include "walg/mode_algebra.hpp"
#include "walg/rational.hpp"

namespace walg {

// ---------------------------------------------------------------------------
// PBW monomials and basis enumeration
// ---------------------------------------------------------------------------

// A PBW basis monomial L_{-n_1}...L_{-n_j} W_{-m_1}...W_{-m_k} applied to the
// lowest-weight vector, with both index lists weakly decreasing.  For the
// Heisenberg module l_part holds the J_{-n} indices and w_part stays empty.
struct PBWMonomial {
  std::vector<int> l_part;
  std::vector<int> w_part;

  friend auto operator<=>(const PBWMonomial&, const PBWMonomial&) = default;

  bool is_vacuum() const { return l_part.empty() && w_part.empty(); }
  int level() const;
};

std::string to_string(const PBWMonomial& m, AlgebraKind kind = AlgebraKind::Virasoro);

// All partitions of n as weakly decreasing lists, ordered by largest part
// ascending (so [1,1,1], [2,1], [3] for n = 3).  partitions(0) = {[]}.
const std::vector<std::vector<int>>& integer_partitions(int n);

// PBW monomials of the given level in the fixed deterministic order: all-L
// monomials first (L-weight descending from `level` to 0), and within a fixed
// split the two partition lists each in integer_partitions order.
std::vector<PBWMonomial> enumerate_basis(const AlgebraSpec& alg, int level);

// Exact element of the universal span, as coefficients on PBW monomials.
using ModuleState = std::map<PBWMonomial, Rational>;

// ---------------------------------------------------------------------------
// Radical quotient data
// ---------------------------------------------------------------------------

// Result of the exact symmetric elimination of one Gram block: a maximal
// subset of basis vectors whose restricted Gram is positive definite
// (witnessed by the stored unit-triangular LDL factorization with positive
// pivots), and for every remaining basis vector its exact projection onto
// that subset modulo the radical.
struct QuotientData {
  std::size_t rank = 0;
  // Basis indices of the selected positive-definite subset, ascending.
  std::vector<std::size_t> selected;
  // Position of each basis index inside `selected`, or -1 if the vector is
  // null modulo the selected span.
  std::vector<std::ptrdiff_t> selected_pos;
  // For each null basis index j: coefficients x with v_j = sum_s x_s v_{sel_s}
  // modulo the radical.  Empty vectors for selected indices.
  std::vector<std::vector<Rational>> null_coeffs;
  // LDL factorization of G[selected, selected]: row i of ldl_rows holds the i
  // strictly-lower unit-triangular entries, ldl_diag the positive pivots.
  std::vector<std::vector<Rational>> ldl_rows;
  std::vector<Rational> ldl_diag;

  // Solves G[selected, selected] x = rhs exactly.
  std::vector<Rational> solve(std::vector<Rational> rhs) const;
};

// ---------------------------------------------------------------------------
// Graded lowest-weight module
// ---------------------------------------------------------------------------

// Level-by-level lowest-weight module for Virasoro, W3 or the Heisenberg
// current algebra: PBW basis, exact Gram blocks and radical quotients.  The
// Gram form is the unique invariant form with <O, O> = 1, (phi_n)^+ = phi_{-n}.
//
// Degenerate parameters (h < 0, c <= 0, null directions) are allowed
// everywhere except radical_quotient, which refuses indefinite blocks.
// Levels are built sequentially and are immutable once built.
class GradedModule {
public:
  explicit GradedModule(AlgebraSpec alg, Rational h = Rational(0), Rational w = Rational(0));
  ~GradedModule();
  GradedModule(GradedModule&&) noexcept;
  GradedModule& operator=(GradedModule&&) noexcept;

  const AlgebraSpec& algebra() const;
  const Rational& lowest_h() const;
  const Rational& lowest_w() const;

  // Enumerates bases and computes Gram blocks for all levels <= max_level.
  // Idempotent; extending an existing build reuses everything already done.
  void build_to(int max_level);
  int max_built() const;  // -1 before the first build_to

  const std::vector<PBWMonomial>& basis(int level) const;
  std::size_t dim(int level) const;
  std::size_t basis_index(int level, const PBWMonomial& m) const;
  const RatMat& gram_matrix(int level) const;

  // Lazy per-level radical quotient; throws NegativeFormError (witness
  // coordinates in the full PBW basis) if the block is not positive
  // semidefinite.
  const QuotientData& radical_quotient(int level);
  std::size_t quotient_rank(int level);

  // <A Omega, B Omega>, exact.  Does not require build_to; different levels
  // short-circuit to 0.
  Rational vacuum_expectation(const PBWMonomial& a, const PBWMonomial& b);

  // Action of a single mode on a monomial in the universal span, exact.
  // Positive modes annihilate the vacuum, L_0 / W_0 act by h + level / w on
  // it, central symbols act as scalars.  The LSq marker expands to the
  // finitely many L_a L_b terms that survive on the monomial's level.
  ModuleState apply_mode(GeneratorSymbol g, const PBWMonomial& m);
  ModuleState apply_mode(GeneratorSymbol g, const ModuleState& s);
  ModuleState apply_word(const ModeWord& word, const PBWMonomial& m);
  ModuleState apply_polynomial(const ModePolynomial& p, const PBWMonomial& m);

  // Matrix of the mode action between quotient bases: columns indexed by the
  // selected basis of from_level, rows by the selected basis of the target
  // level from_level - index (clamped to an empty matrix below level 0).
  // Polynomials must be homogeneous in grade.  Throws RangeError if a needed
  // level is not built.
  RatMat mode_matrix(GeneratorSymbol g, int from_level);
  RatMat mode_matrix(const ModePolynomial& p, int from_level);

  // Same action in the raw PBW bases of the universal span, skipping the
  // quotient entirely.  Agrees with mode_matrix whenever the Gram blocks are
  // definite (trivial radical).
  RatMat mode_matrix_raw(GeneratorSymbol g, int from_level);
  RatMat mode_matrix_raw(const ModePolynomial& p, int from_level);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Operators as level-block families
// ---------------------------------------------------------------------------

// A mode operator recorded as its matrix blocks between quotient bases.
// blocks[n] maps level n to level n + grade; source levels whose target falls
// outside the built range are absent rather than zero-filled.
struct LevelBlockOperator {
  ModePolynomial symbol;
  int grade = 0;
  std::map<int, RatMat> blocks;
};

LevelBlockOperator block_operator(GradedModule& mod, GeneratorSymbol g, int min_from,
                                  int max_from);
LevelBlockOperator block_operator(GradedModule& mod, const ModePolynomial& p, int min_from,
                                  int max_from);

// ---------------------------------------------------------------------------
// Exact linear algebra helpers
// ---------------------------------------------------------------------------

// Sign of det(m) in {-1, 0, +1}, by Bareiss fraction-free elimination on a
// denominator-cleared integer copy.
int det_sign_fraction_free(const RatMat& m);

// Rank by exact Gaussian elimination.
std::size_t rank_exact(RatMat m);

// Exact positive semidefiniteness of a symmetric matrix, by symmetric
// elimination with nonnegative pivots.
bool is_positive_semidefinite_exact(RatMat m);

// ---------------------------------------------------------------------------
// Positivity reports
// ---------------------------------------------------------------------------

struct KacLevelReport {
  int level = 0;
  int det_sign = 0;          // exact
  std::size_t rank = 0;      // exact
  double min_eigenvalue_estimate = 0.0;  // float diagnostic only
};

// Exact determinant signs and ranks of the Virasoro Verma Gram blocks at
// (c, h) for levels 1..max_level, with a floating minimum eigenvalue per
// block as a diagnostic.
std::vector<KacLevelReport> kac_positivity_report(const Rational& c, const Rational& h,
                                                  int max_level);

// Whether (c, h, w) satisfies h >= (c-2)/24 together with
// |w| <= sqrt(8/(198+45c)) (2h - (c-2)/12)^{3/2}; the square-root comparison
// is done by exact squaring.  Requires c >= 2; a negative power base returns
// false.
bool admissible_region(const Rational& c, const Rational& h, const Rational& w);

}  // namespace walg
