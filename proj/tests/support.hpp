#pragma once

// Shared helpers for representation-level checks: bracket relations and
// Jacobi sums as matrix identities between level blocks.  A level below 0 is
// treated as the zero space, and configurations needing levels above the
// built range are skipped by the callers' validity filters.

#include <map>
#include <tuple>

#include "walg/lowest_weight.hpp"
#include "walg/mode_algebra.hpp"

namespace walg::testsupport {

inline std::size_t vdim_raw(GradedModule& mod, int lev) {
  return lev < 0 ? 0 : mod.dim(lev);
}

inline std::size_t vdim_quot(GradedModule& mod, int lev) {
  return lev < 0 ? 0 : mod.quotient_rank(lev);
}

// Cached single-generator blocks in the raw PBW bases.
struct RawBlockCache {
  explicit RawBlockCache(GradedModule& m) : mod(m) {}
  GradedModule& mod;
  std::map<std::tuple<Family, int, int>, RatMat> cache;

  const RatMat& get(GeneratorSymbol g, int from) {
    auto key = std::make_tuple(g.family, g.index, from);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, mod.mode_matrix_raw(g, from)).first;
    return it->second;
  }

  RatMat block(GeneratorSymbol g, int from) {
    if (from < 0) return RatMat(vdim_raw(mod, from - g.index), 0);
    return get(g, from);
  }

  RatMat poly_block(const ModePolynomial& p, int grade, int from) {
    if (from < 0) return RatMat(vdim_raw(mod, from + grade), 0);
    if (p.is_zero()) return RatMat(vdim_raw(mod, from + grade), vdim_raw(mod, from));
    return mod.mode_matrix_raw(p, from);
  }
};

// Cached single-generator blocks in the quotient bases.
struct QuotientBlockCache {
  explicit QuotientBlockCache(GradedModule& m) : mod(m) {}
  GradedModule& mod;
  std::map<std::tuple<Family, int, int>, RatMat> cache;

  const RatMat& get(GeneratorSymbol g, int from) {
    auto key = std::make_tuple(g.family, g.index, from);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, mod.mode_matrix(g, from)).first;
    return it->second;
  }

  RatMat block(GeneratorSymbol g, int from) {
    if (from < 0) return RatMat(vdim_quot(mod, from - g.index), 0);
    return get(g, from);
  }

  RatMat poly_block(const ModePolynomial& p, int grade, int from) {
    if (from < 0) return RatMat(vdim_quot(mod, from + grade), 0);
    if (p.is_zero()) return RatMat(vdim_quot(mod, from + grade), vdim_quot(mod, from));
    return mod.mode_matrix(p, from);
  }
};

struct CheckTally {
  int checked = 0;
  int failed = 0;

  void merge(const CheckTally& o) {
    checked += o.checked;
    failed += o.failed;
  }
};

// Verifies M(x) M(y) - M(y) M(x) == M([x, y]) at one source level.  Returns
// false (skip) if a needed level exceeds the built range.
template <typename Cache>
bool bracket_holds_at(Cache& cache, GeneratorSymbol x, GeneratorSymbol y,
                      const AlgebraSpec& alg, int source) {
  GradedModule& mod = cache.mod;
  const int H = mod.max_built();
  const int m = x.index;
  const int n = y.index;
  const ModePolynomial rhs = commutator(x, y, alg);
  for (int lev : {source, source - n, source - m, source - m - n})
    if (lev > H) return true;  // treated as skipped by the caller's tally
  const RatMat lhs = cache.block(x, source - n) * cache.block(y, source) -
                     cache.block(y, source - m) * cache.block(x, source);
  return lhs == cache.poly_block(rhs, -(m + n), source);
}

template <typename Cache>
CheckTally check_bracket(Cache& cache, GeneratorSymbol x, GeneratorSymbol y,
                         const AlgebraSpec& alg, int max_source) {
  GradedModule& mod = cache.mod;
  const int H = mod.max_built();
  const int m = x.index;
  const int n = y.index;
  CheckTally tally;
  for (int lev = 0; lev <= max_source; ++lev) {
    bool in_range = true;
    for (int need : {lev, lev - n, lev - m, lev - m - n})
      if (need > H) in_range = false;
    if (!in_range) continue;
    ++tally.checked;
    if (!bracket_holds_at(cache, x, y, alg, lev)) ++tally.failed;
  }
  return tally;
}

// Verifies [L_a, [W_b, W_c]] - [[L_a, W_b], W_c] - [W_b, [L_a, W_c]] == 0 as
// matrices at one source level (W3 only).
inline bool jacobi_holds_at(RawBlockCache& cache, int a, int b, int c, const AlgebraSpec& alg,
                            int source) {
  const ModePolynomial p_bc = commutator(gen_W(b), gen_W(c), alg);
  const ModePolynomial q_ab = commutator(gen_L(a), gen_W(b), alg);
  const ModePolynomial r_ac = commutator(gen_L(a), gen_W(c), alg);
  const int l = source;
  RatMat t1 = cache.block(gen_L(a), l - b - c) * cache.poly_block(p_bc, -(b + c), l) -
              cache.poly_block(p_bc, -(b + c), l - a) * cache.block(gen_L(a), l);
  const RatMat t2 = cache.poly_block(q_ab, -(a + b), l - c) * cache.block(gen_W(c), l) -
                    cache.block(gen_W(c), l - a - b) * cache.poly_block(q_ab, -(a + b), l);
  const RatMat t3 = cache.block(gen_W(b), l - a - c) * cache.poly_block(r_ac, -(a + c), l) -
                    cache.poly_block(r_ac, -(a + c), l - b) * cache.block(gen_W(b), l);
  t1 -= t2;
  t1 -= t3;
  return t1.is_zero();
}

inline CheckTally check_jacobi(RawBlockCache& cache, int a, int b, int c, const AlgebraSpec& alg,
                               int max_source) {
  GradedModule& mod = cache.mod;
  const int H = mod.max_built();
  CheckTally tally;
  for (int l = 0; l <= max_source; ++l) {
    bool in_range = true;
    for (int need : {l, l - a, l - b, l - c, l - a - b, l - a - c, l - b - c, l - a - b - c})
      if (need > H) in_range = false;
    if (!in_range) continue;
    ++tally.checked;
    if (!jacobi_holds_at(cache, a, b, c, alg, l)) ++tally.failed;
  }
  return tally;
}

}  // namespace walg::testsupport
