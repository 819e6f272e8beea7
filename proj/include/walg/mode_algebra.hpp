#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "walg/errors.hpp"
#include "walg/rational.hpp"

namespace walg {

// ---------------------------------------------------------------------------
// Algebra selection
// ---------------------------------------------------------------------------

enum class AlgebraKind : std::uint8_t { Virasoro, W3, Heisenberg };

std::string to_string(AlgebraKind kind);
AlgebraKind parse_algebra_kind(const std::string& name);

// Which mode algebra a computation runs in, with the central charge fixed to a
// rational for the whole session.  For W3 the derived constant b^2 =
// 16/(22+5c) is exposed; c = -22/5 is rejected.
struct AlgebraSpec {
  AlgebraKind kind = AlgebraKind::Virasoro;
  Rational c{0};

  static AlgebraSpec virasoro(Rational c);
  static AlgebraSpec w3(Rational c);
  static AlgebraSpec heisenberg();

  Rational b_sq() const;
};

// ---------------------------------------------------------------------------
// Generators and words
// ---------------------------------------------------------------------------

// LSq is the quadratic-sum marker :L^2:_n.  It is an opaque factor: it has no
// symbolic commutators and is expanded into finitely many L_a L_b terms only
// when applied to a graded vector, where the vector's level bounds the sum.
enum class Family : std::uint8_t { One, Z, L, W, J, LSq };

std::string to_string(Family family);

struct GeneratorSymbol {
  Family family = Family::One;
  int index = 0;  // mode number; 0 for Z and One

  friend auto operator<=>(const GeneratorSymbol&, const GeneratorSymbol&) = default;

  // Contribution to level(word) = -sum of indices.
  int grade() const { return -index; }
  bool is_central() const { return family == Family::One || family == Family::Z; }
};

std::string to_string(const GeneratorSymbol& g);

inline GeneratorSymbol gen_L(int n) { return {Family::L, n}; }
inline GeneratorSymbol gen_W(int n) { return {Family::W, n}; }
inline GeneratorSymbol gen_J(int n) { return {Family::J, n}; }
inline GeneratorSymbol gen_Z() { return {Family::Z, 0}; }
inline GeneratorSymbol gen_one() { return {Family::One, 0}; }
inline GeneratorSymbol gen_LSq(int n) { return {Family::LSq, n}; }

struct ModeWord {
  std::vector<GeneratorSymbol> factors;

  ModeWord() = default;
  explicit ModeWord(std::vector<GeneratorSymbol> f) : factors(std::move(f)) {}

  friend auto operator<=>(const ModeWord&, const ModeWord&) = default;

  bool empty() const { return factors.empty(); }
  int level() const;
  bool has_marker() const;
};

std::string to_string(const ModeWord& word);

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

// Exact linear combination of mode words.  Zero coefficients are never stored.
class ModePolynomial {
public:
  using TermMap = std::map<ModeWord, Rational>;

  ModePolynomial() = default;
  static ModePolynomial zero() { return {}; }
  static ModePolynomial term(ModeWord word, Rational coeff);
  static ModePolynomial generator(GeneratorSymbol g, Rational coeff = Rational(1));

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const ModeWord& word, const Rational& coeff);
  ModePolynomial& operator+=(const ModePolynomial& other);
  ModePolynomial& operator-=(const ModePolynomial& other);
  ModePolynomial& operator*=(const Rational& scalar);
  friend ModePolynomial operator+(ModePolynomial a, const ModePolynomial& b) { return a += b; }
  friend ModePolynomial operator-(ModePolynomial a, const ModePolynomial& b) { return a -= b; }
  friend ModePolynomial operator*(const Rational& s, ModePolynomial p) { return p *= s; }
  friend bool operator==(const ModePolynomial&, const ModePolynomial&) = default;

  // Word-by-word concatenation products.
  friend ModePolynomial operator*(const ModePolynomial& a, const ModePolynomial& b);

private:
  TermMap terms_;
};

std::string to_string(const ModePolynomial& p);

// ---------------------------------------------------------------------------
// Field metadata
// ---------------------------------------------------------------------------

struct FieldSpec {
  std::string name;
  Family family = Family::L;
  int conformal_dimension = 2;  // 2 for L, 3 for W, 1 for J
  bool hermitian = true;

  static FieldSpec stress_energy();
  static FieldSpec w_field();
  static FieldSpec current();
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// [a, b] in the given algebra.  For [W_m, W_n] the Lambda_{m+n} term is
// expanded via lambda_modes, so results contain only L, W, Z, One symbols and
// the quadratic-sum marker.  Central symbols commute with everything.
ModePolynomial commutator(GeneratorSymbol a, GeneratorSymbol b, const AlgebraSpec& alg);

// Lambda_n = :L^2:_n - (3/10)(n+2)(n+3) L_n, with the quadratic part kept as
// the LSq marker.
ModePolynomial lambda_modes(int n);

// :L^2:_n as a (marker) polynomial.
ModePolynomial wick_square_L(int n);

// The k-sum terms of :L^2:_n that act nonzero on a vector of the given level:
// ordered pairs (a, b) meaning "apply L_b first, then L_a".  Split at k = -2
// as in the defining two-sided sum.
std::vector<std::pair<int, int>> wick_square_expansion(int n, int level);

enum class RewriteStrategy : std::uint8_t { Leftmost, Rightmost };

// Rewrites every word into PBW order: family L before W, ascending mode index
// within a family (so raising modes precede lowering modes).  One factors are
// absorbed, Z factors move to the front.  Words containing the LSq marker are
// sorted only within marker-free runs; the marker itself is never moved.
// Exceeding the step budget raises ResourceError.
ModePolynomial normal_order(const ModePolynomial& p, const AlgebraSpec& alg,
                            RewriteStrategy strategy = RewriteStrategy::Leftmost,
                            unsigned long long step_budget = 10'000'000ULL);

}  // namespace walg
