#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "support.hpp"
#include "walg/errors.hpp"
#include "walg/exact_mat.hpp"
#include "walg/lowest_weight.hpp"
#include "walg/mode_algebra.hpp"
#include "walg/rational.hpp"

using namespace walg;
using walg::testsupport::CheckTally;
using walg::testsupport::QuotientBlockCache;
using walg::testsupport::RawBlockCache;
using walg::testsupport::check_bracket;

namespace {

PBWMonomial mono(std::vector<int> l, std::vector<int> w = {}) {
  return PBWMonomial{std::move(l), std::move(w)};
}

ModeWord word(std::initializer_list<GeneratorSymbol> gs) {
  return ModeWord{std::vector<GeneratorSymbol>(gs)};
}

// Drops exact zeros so states built along different routes compare equal.
ModuleState clean(ModuleState s) {
  for (auto it = s.begin(); it != s.end();) {
    if (it->second == 0)
      it = s.erase(it);
    else
      ++it;
  }
  return s;
}

RatMat gram_selected(GradedModule& mod, int level) {
  const auto& q = mod.radical_quotient(level);
  const auto& g = mod.gram_matrix(level);
  RatMat out(q.rank, q.rank);
  for (std::size_t s = 0; s < q.rank; ++s)
    for (std::size_t t = 0; t < q.rank; ++t) out.at(s, t) = g.at(q.selected[s], q.selected[t]);
  return out;
}

// Structural sanity of one radical quotient: index maps, coefficient shapes,
// positive pivots.
void check_quotient_contract(GradedModule& mod, int level) {
  const auto& q = mod.radical_quotient(level);
  const std::size_t d = mod.dim(level);
  REQUIRE(q.selected.size() == q.rank);
  REQUIRE(q.selected_pos.size() == d);
  REQUIRE(q.null_coeffs.size() == d);
  REQUIRE(q.ldl_diag.size() == q.rank);
  REQUIRE(q.ldl_rows.size() == q.rank);
  CHECK(std::is_sorted(q.selected.begin(), q.selected.end()));
  for (std::size_t s = 0; s < q.rank; ++s) {
    CHECK(q.selected_pos[q.selected[s]] == static_cast<std::ptrdiff_t>(s));
    CHECK(q.ldl_diag[s] > 0);
    CHECK(q.ldl_rows[s].size() == s);
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (q.selected_pos[j] >= 0)
      CHECK(q.null_coeffs[j].empty());
    else
      CHECK(q.null_coeffs[j].size() == q.rank);
  }
}

// The whole Gram block must be recovered from the selected block and the
// projection coefficients: G = C^T G_SS C with C the expansion matrix.
void check_gram_reconstruction(GradedModule& mod, int level) {
  check_quotient_contract(mod, level);
  const auto& q = mod.radical_quotient(level);
  const auto& g = mod.gram_matrix(level);
  const std::size_t d = mod.dim(level);
  RatMat expand(q.rank, d);
  for (std::size_t j = 0; j < d; ++j) {
    if (q.selected_pos[j] >= 0)
      expand.at(static_cast<std::size_t>(q.selected_pos[j]), j) = 1;
    else
      for (std::size_t s = 0; s < q.rank; ++s) expand.at(s, j) = q.null_coeffs[j][s];
  }
  CHECK(expand.transpose() * gram_selected(mod, level) * expand == g);
}

void check_gram_matches_pairing(GradedModule& mod, int max_level) {
  for (int lev = 0; lev <= max_level; ++lev) {
    const auto& basis = mod.basis(lev);
    const auto& g = mod.gram_matrix(lev);
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j)
        CHECK(g.at(i, j) == mod.vacuum_expectation(basis[i], basis[j]));
  }
}

// <v_i, phi_k u_j> computed through either factor's adjoint must agree:
// G_n M(phi_k; n+k -> n) = M(phi_{-k}; n -> n+k)^T G_{n+k}.
void check_adjoint_identity_raw(GradedModule& mod, GeneratorSymbol g, int max_level) {
  const int k = -g.index;  // lowering amount of the adjoint pair
  for (int n = 0; n + std::abs(k) <= max_level; ++n) {
    const int m = n + std::abs(k);
    GeneratorSymbol lower{g.family, std::abs(k)};
    GeneratorSymbol raise{g.family, -std::abs(k)};
    RatMat lhs = mod.gram_matrix(n) * mod.mode_matrix_raw(lower, m);
    RatMat rhs = mod.mode_matrix_raw(raise, n).transpose() * mod.gram_matrix(m);
    CHECK(lhs == rhs);
  }
}

void check_adjoint_identity_quotient(GradedModule& mod, Family fam, int k, int max_level) {
  for (int n = 0; n + k <= max_level; ++n) {
    const int m = n + k;
    RatMat lhs = gram_selected(mod, n) * mod.mode_matrix(GeneratorSymbol{fam, k}, m);
    RatMat rhs =
        mod.mode_matrix(GeneratorSymbol{fam, -k}, n).transpose() * gram_selected(mod, m);
    CHECK(lhs == rhs);
  }
}

}  // namespace

TEST_CASE("integer partitions: counts and ordering") {
  const std::vector<std::size_t> counts = {1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77};
  for (int n = 0; n <= 12; ++n) CHECK(integer_partitions(n).size() == counts[n]);
  const auto& p3 = integer_partitions(3);
  REQUIRE(p3.size() == 3);
  CHECK(p3[0] == std::vector<int>{1, 1, 1});
  CHECK(p3[1] == std::vector<int>{2, 1});
  CHECK(p3[2] == std::vector<int>{3});
  CHECK(integer_partitions(0) == std::vector<std::vector<int>>{{}});
}

TEST_CASE("basis enumeration: orders and dimension counts") {
  const AlgebraSpec vir = AlgebraSpec::virasoro(rat(1));
  const AlgebraSpec w3 = AlgebraSpec::w3(rat(3));
  const AlgebraSpec heis = AlgebraSpec::heisenberg();

  CHECK(enumerate_basis(vir, 0) == std::vector<PBWMonomial>{mono({})});
  CHECK(enumerate_basis(vir, 2) == std::vector<PBWMonomial>{mono({1, 1}), mono({2})});

  const std::vector<PBWMonomial> w3_level2 = {mono({1, 1}), mono({2}), mono({1}, {1}),
                                              mono({}, {1, 1}), mono({}, {2})};
  CHECK(enumerate_basis(w3, 2) == w3_level2);

  // W monomials of level 3 sit at indices 2 (L[-3]) and 9 (W[-3]).
  const auto w3_level3 = enumerate_basis(w3, 3);
  REQUIRE(w3_level3.size() == 10);
  CHECK(w3_level3[2] == mono({3}));
  CHECK(w3_level3[9] == mono({}, {3}));

  for (int n = 0; n <= 12; ++n) {
    const std::size_t pn = integer_partitions(n).size();
    CHECK(enumerate_basis(vir, n).size() == pn);
    CHECK(enumerate_basis(heis, n).size() == pn);
    std::size_t conv = 0;
    for (int a = 0; a <= n; ++a)
      conv += integer_partitions(a).size() * integer_partitions(n - a).size();
    CHECK(enumerate_basis(w3, n).size() == conv);
  }
}

TEST_CASE("monomial printing") {
  CHECK(to_string(mono({})) == "Omega");
  CHECK(to_string(mono({2, 1, 1})) == "L[-2] L[-1]^2");
  CHECK(to_string(mono({1}, {2, 1}), AlgebraKind::W3) == "L[-1] W[-2] W[-1]");
  CHECK(to_string(mono({3, 1}), AlgebraKind::Heisenberg) == "J[-3] J[-1]");
}

TEST_CASE("vacuum expectation: oracle values") {
  GradedModule vir(AlgebraSpec::virasoro(rat(7, 2)), rat(1, 6));
  CHECK(vir.vacuum_expectation(mono({}), mono({})) == 1);
  CHECK(vir.vacuum_expectation(mono({1}), mono({1})) == rat(1, 3));    // 2h
  CHECK(vir.vacuum_expectation(mono({2}), mono({2})) == rat(29, 12));  // 4h + c/2
  CHECK(vir.vacuum_expectation(mono({}), mono({1})) == 0);
  CHECK(vir.vacuum_expectation(mono({1}), mono({2})) == 0);

  GradedModule vac(AlgebraSpec::virasoro(rat(7, 2)));
  CHECK(vac.vacuum_expectation(mono({3}), mono({3})) == 7);  // 2c

  GradedModule w3vac2(AlgebraSpec::w3(rat(2)));
  CHECK(w3vac2.vacuum_expectation(mono({}, {3}), mono({}, {3})) == rat(2, 3));  // c/3
  CHECK(w3vac2.vacuum_expectation(mono({3}), mono({}, {3})) == 0);

  GradedModule w3vac3(AlgebraSpec::w3(rat(3)));
  CHECK(w3vac3.vacuum_expectation(mono({}, {3}), mono({}, {3})) == 1);

  // Generic W3 lowest weight: the W[-3] norm assembles the zero-mode value
  // of the quadratic piece, Lambda_0 = :L^2:_0 - (9/5) L_0 acting by
  // h^2 + h/5, so |W[-3] O|^2 = c/3 + 6 b^2 (h^2 + h/5) + (111/10) h.
  const Rational c = rat(2), h = rat(1, 3), w = rat(1, 7);
  const AlgebraSpec alg = AlgebraSpec::w3(c);
  GradedModule w3gen(alg, h, w);
  const Rational expected =
      c / 3 + 6 * alg.b_sq() * (h * h + h / 5) + rat(37, 5) * h;
  CHECK(w3gen.vacuum_expectation(mono({}, {3}), mono({}, {3})) == expected);
  CHECK(w3gen.vacuum_expectation(mono({3}), mono({}, {3})) == 9 * w);
}

TEST_CASE("Virasoro module at c=7/2, h=1/6") {
  const Rational h = rat(1, 6);
  const AlgebraSpec alg = AlgebraSpec::virasoro(rat(7, 2));
  GradedModule mod(alg, h);
  mod.build_to(10);
  CHECK(mod.max_built() == 10);
  CHECK(mod.dim(10) == 42);
  CHECK(mod.basis_index(2, mono({2})) == 1);

  SUBCASE("level-1 Gram") {
    const auto& g = mod.gram_matrix(1);
    REQUIRE(g.rows() == 1);
    CHECK(g.at(0, 0) == rat(1, 3));
  }

  SUBCASE("Gram blocks agree with direct pairing") { check_gram_matches_pairing(mod, 5); }

  SUBCASE("mode matrices: pinned examples") {
    const RatMat l1 = mod.mode_matrix(gen_L(1), 2);
    REQUIRE(l1.rows() == 1);
    REQUIRE(l1.cols() == 2);
    CHECK(l1.at(0, 0) == rat(8, 3));  // 4h + 2
    CHECK(l1.at(0, 1) == 3);

    RatMat expected = RatMat::identity(3);
    expected *= h + 3;
    CHECK(mod.mode_matrix(gen_L(0), 3) == expected);

    // Definite Gram blocks: quotient and raw coordinates coincide.
    CHECK(mod.mode_matrix(gen_L(-2), 2) == mod.mode_matrix_raw(gen_L(-2), 2));
    CHECK(mod.mode_matrix(gen_L(2), 4) == mod.mode_matrix_raw(gen_L(2), 4));
  }

  SUBCASE("apply_mode and apply_word spot values") {
    CHECK(clean(mod.apply_mode(gen_L(1), mono({1}))) == ModuleState{{mono({}), rat(1, 3)}});
    CHECK(clean(mod.apply_mode(gen_L(1), mono({1, 1}))) ==
          ModuleState{{mono({1}), rat(8, 3)}});
    CHECK(clean(mod.apply_word(word({gen_L(1), gen_L(-2)}), mono({}))) ==
          ModuleState{{mono({1}), Rational(3)}});
  }

  SUBCASE("quadratic sum on low states") {
    // :L^2:_0 O = (2h + h^2) O and :L^2:_0 L[-1] O = (h^2 + 8h + 3) L[-1] O.
    CHECK(clean(mod.apply_polynomial(wick_square_L(0), mono({}))) ==
          ModuleState{{mono({}), rat(13, 36)}});
    CHECK(clean(mod.apply_polynomial(wick_square_L(0), mono({1}))) ==
          ModuleState{{mono({1}), rat(157, 36)}});
  }

  SUBCASE("commutators with the quadratic sum as matrices") {
    RawBlockCache cache(mod);
    const int H = mod.max_built();
    for (int n = -2; n <= 2; ++n) {
      const ModePolynomial sn = wick_square_L(n);
      const ModePolynomial sn1 = wick_square_L(n + 1);
      for (int l = 0; l <= 6; ++l) {
        if (l - n > H || l - n - 1 > H) continue;
        // [L_0, :L^2:_n] = -n :L^2:_n
        RatMat lhs0 = cache.block(gen_L(0), l - n) * cache.poly_block(sn, -n, l) -
                      cache.poly_block(sn, -n, l) * cache.block(gen_L(0), l);
        RatMat rhs0 = cache.poly_block(sn, -n, l);
        rhs0 *= Rational(-n);
        CHECK(lhs0 == rhs0);
        // [L_1, :L^2:_n] = (3 - n) :L^2:_{n+1} - 3 (n + 3) L_{n+1}; the bare
        // quadratic sum is not L_1-covariant, only the corrected
        // quasi-primary combination is.
        RatMat lhs1 = cache.block(gen_L(1), l - n) * cache.poly_block(sn, -n, l) -
                      cache.poly_block(sn, -n, l - 1) * cache.block(gen_L(1), l);
        RatMat rhs1 = cache.poly_block(sn1, -n - 1, l);
        rhs1 *= Rational(3 - n);
        RatMat corr = cache.block(GeneratorSymbol{Family::L, n + 1}, l);
        corr *= Rational(-3 * (n + 3));
        rhs1 += corr;
        CHECK(lhs1 == rhs1);
      }
    }
  }

  SUBCASE("bracket relations as matrices, indices up to 5") {
    RawBlockCache cache(mod);
    CheckTally total;
    for (int m = -5; m <= 5; ++m)
      for (int n = -5; n <= 5; ++n)
        total.merge(check_bracket(cache, gen_L(m), gen_L(n), alg, 10));
    CHECK(total.failed == 0);
    CHECK(total.checked >= 600);
    const CheckTally edge = check_bracket(cache, gen_L(5), gen_L(-5), alg, 10);
    CHECK(edge.checked == 6);
    CHECK(edge.failed == 0);
  }

  SUBCASE("adjoint identity between Gram blocks") {
    for (int k = 1; k <= 3; ++k) check_adjoint_identity_raw(mod, gen_L(k), 6);
  }

  SUBCASE("block operator families") {
    LevelBlockOperator lower = block_operator(mod, gen_L(2), 0, 4);
    CHECK(lower.grade == -2);
    REQUIRE(lower.blocks.size() == 3);
    for (int from : {2, 3, 4}) {
      REQUIRE(lower.blocks.count(from) == 1);
      CHECK(lower.blocks.at(from) == mod.mode_matrix(gen_L(2), from));
    }
    LevelBlockOperator raise = block_operator(mod, gen_L(-2), 0, 4);
    CHECK(raise.grade == 2);
    REQUIRE(raise.blocks.size() == 5);
    for (int from : {0, 1, 2, 3, 4}) REQUIRE(raise.blocks.count(from) == 1);
  }

  SUBCASE("range and domain errors") {
    CHECK_THROWS_AS(mod.basis(11), RangeError);
    CHECK_THROWS_AS(mod.gram_matrix(11), RangeError);
    CHECK_THROWS_AS(mod.mode_matrix(gen_L(-1), 10), RangeError);
    CHECK_THROWS_AS(mod.mode_matrix(gen_L(1), 11), RangeError);
    CHECK_THROWS_AS(mod.mode_matrix(ModePolynomial::zero(), 1), DomainError);
    ModePolynomial mixed = ModePolynomial::generator(gen_L(0));
    mixed += ModePolynomial::generator(gen_L(1));
    CHECK_THROWS_AS(mod.mode_matrix(mixed, 2), DomainError);
    CHECK_THROWS_AS(mod.apply_mode(gen_L(1), mono({-1})), DomainError);
    CHECK_THROWS_AS(mod.apply_mode(gen_L(1), mono({1, 2})), DomainError);
    CHECK_THROWS_AS(mod.vacuum_expectation(mono({}, {1}), mono({}, {1})), DomainError);
  }
}

TEST_CASE("Virasoro level-2 Gram at c=3/2, h=1/5") {
  GradedModule mod(AlgebraSpec::virasoro(rat(3, 2)), rat(1, 5));
  mod.build_to(2);
  const auto& g = mod.gram_matrix(2);
  REQUIRE(g.rows() == 2);
  CHECK(g.at(0, 0) == rat(28, 25));
  CHECK(g.at(0, 1) == rat(6, 5));
  CHECK(g.at(1, 0) == rat(6, 5));
  CHECK(g.at(1, 1) == rat(31, 20));
  CHECK(mod.quotient_rank(2) == 2);
  CHECK(det_sign_fraction_free(g) == 1);
}

TEST_CASE("degenerate Virasoro quotients") {
  SUBCASE("c=1/2, h=1/16: level-2 null vector with exact projection") {
    GradedModule mod(AlgebraSpec::virasoro(rat(1, 2)), rat(1, 16));
    mod.build_to(4);
    const auto& q = mod.radical_quotient(2);
    CHECK(q.rank == 1);
    REQUIRE(q.selected == std::vector<std::size_t>{0});
    CHECK(q.selected_pos[1] == -1);
    REQUIRE(q.null_coeffs[1].size() == 1);
    CHECK(q.null_coeffs[1][0] == rat(4, 3));  // L[-2] = (4/3) L[-1]^2 mod radical
    for (int lev = 1; lev <= 4; ++lev) {
      check_gram_reconstruction(mod, lev);
      CHECK(mod.quotient_rank(lev) == rank_exact(mod.gram_matrix(lev)));
    }
  }

  SUBCASE("c=1, h=0: vacuum degeneracy") {
    GradedModule mod(AlgebraSpec::virasoro(rat(1)));
    mod.build_to(4);
    CHECK(mod.quotient_rank(1) == 0);
    CHECK(mod.quotient_rank(2) == 1);
    for (int lev = 1; lev <= 4; ++lev) {
      check_gram_reconstruction(mod, lev);
      CHECK(mod.quotient_rank(lev) == rank_exact(mod.gram_matrix(lev)));
    }
  }

  SUBCASE("indefinite blocks are refused with a negative witness") {
    GradedModule mod(AlgebraSpec::virasoro(rat(1, 2)), rat(-1));
    mod.build_to(2);
    for (int lev : {1, 2}) {
      try {
        mod.radical_quotient(lev);
        FAIL("expected NegativeFormError at level ", lev);
      } catch (const NegativeFormError& e) {
        const auto& g = mod.gram_matrix(lev);
        REQUIRE(e.witness.size() == mod.dim(lev));
        std::vector<Rational> v;
        for (const auto& s : e.witness) v.push_back(parse_rational(s));
        Rational quad = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
          for (std::size_t j = 0; j < v.size(); ++j) quad += v[i] * g.at(i, j) * v[j];
        CHECK(quad < 0);
      }
    }
  }
}

TEST_CASE("W3 vacuum module at c=3") {
  const AlgebraSpec alg = AlgebraSpec::w3(rat(3));
  GradedModule mod(alg);
  mod.build_to(8);

  SUBCASE("level-3 quotient: L[-3] and W[-3] survive") {
    const auto& q = mod.radical_quotient(3);
    CHECK(q.rank == 2);
    CHECK(q.selected == std::vector<std::size_t>{2, 9});
    CHECK(mod.gram_matrix(3).at(9, 9) == 1);  // |W[-3] O|^2 = c/3
    const RatMat w3mat = mod.mode_matrix(gen_W(3), 3);
    REQUIRE(w3mat.rows() == 1);
    REQUIRE(w3mat.cols() == 2);
    CHECK(w3mat.at(0, 0) == 0);
    CHECK(w3mat.at(0, 1) == 1);
  }

  SUBCASE("quotient ranks match exact Gaussian ranks") {
    for (int lev = 0; lev <= 6; ++lev)
      CHECK(mod.quotient_rank(lev) == rank_exact(mod.gram_matrix(lev)));
  }

  SUBCASE("Gram reconstruction through the quotient data") {
    for (int lev = 1; lev <= 5; ++lev) check_gram_reconstruction(mod, lev);
  }

  SUBCASE("LDL solve round-trip") {
    const auto& q = mod.radical_quotient(4);
    REQUIRE(q.rank >= 2);
    std::vector<Rational> rhs;
    for (std::size_t s = 0; s < q.rank; ++s) rhs.push_back(rat(static_cast<long>(s) + 1, 3));
    const std::vector<Rational> x = q.solve(rhs);
    const RatMat gss = gram_selected(mod, 4);
    for (std::size_t s = 0; s < q.rank; ++s) {
      Rational acc = 0;
      for (std::size_t t = 0; t < q.rank; ++t) acc += gss.at(s, t) * x[t];
      CHECK(acc == rhs[s]);
    }
  }

  SUBCASE("bracket relations on the quotient, indices up to 4") {
    QuotientBlockCache cache(mod);
    CheckTally ll, lw, ww;
    for (int m = -4; m <= 4; ++m)
      for (int n = -4; n <= 4; ++n) {
        ll.merge(check_bracket(cache, gen_L(m), gen_L(n), alg, 8));
        lw.merge(check_bracket(cache, gen_L(m), gen_W(n), alg, 8));
        ww.merge(check_bracket(cache, gen_W(m), gen_W(n), alg, 8));
      }
    CHECK(ll.failed == 0);
    CHECK(lw.failed == 0);
    CHECK(ww.failed == 0);
    CHECK(ll.checked >= 300);
    CHECK(lw.checked >= 300);
    CHECK(ww.checked >= 300);
    const CheckTally edge = check_bracket(cache, gen_W(4), gen_W(-4), alg, 8);
    CHECK(edge.checked == 5);
    CHECK(edge.failed == 0);
  }

  SUBCASE("adjoint identity on the quotient") {
    for (int k = 1; k <= 3; ++k) {
      check_adjoint_identity_quotient(mod, Family::L, k, 6);
      check_adjoint_identity_quotient(mod, Family::W, k, 6);
    }
  }
}

TEST_CASE("W3 module at c=2, h=1/3, w=1/7") {
  const Rational c = rat(2), h = rat(1, 3), w = rat(1, 7);
  const AlgebraSpec alg = AlgebraSpec::w3(c);
  GradedModule mod(alg, h, w);
  mod.build_to(4);

  SUBCASE("level-1 Gram") {
    // |W[-1] O|^2 = 2 b^2 (h^2 + h/5) - (1/5) h from the k=1 commutator.
    const Rational ww = 2 * alg.b_sq() * (h * h + h / 5) - rat(1, 5) * h;
    const auto& g = mod.gram_matrix(1);
    REQUIRE(g.rows() == 2);
    CHECK(g.at(0, 0) == 2 * h);
    CHECK(g.at(0, 1) == 3 * w);
    CHECK(g.at(1, 0) == 3 * w);
    CHECK(g.at(1, 1) == ww);
    CHECK(ww == rat(1, 9));
  }

  SUBCASE("Gram blocks are symmetric and agree with direct pairing") {
    for (int lev = 0; lev <= 4; ++lev) {
      const auto& g = mod.gram_matrix(lev);
      CHECK(g == g.transpose());
    }
    check_gram_matches_pairing(mod, 4);
  }

  SUBCASE("W-W reordering identity on states") {
    // W_a W_b = W_b W_a + [W_a, W_b] applied to low monomials; exercises the
    // quadratic terms of the bracket through the module action.
    std::vector<PBWMonomial> samples;
    for (int lev = 0; lev <= 2; ++lev)
      for (const auto& m : mod.basis(lev)) samples.push_back(m);
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) {
        ModePolynomial rhs = ModePolynomial::term(word({gen_W(b), gen_W(a)}), rat(1));
        rhs += commutator(gen_W(a), gen_W(b), alg);
        for (const auto& m : samples) {
          CHECK(clean(mod.apply_word(word({gen_W(a), gen_W(b)}), m)) ==
                clean(mod.apply_polynomial(rhs, m)));
        }
      }
  }
}

TEST_CASE("Heisenberg Fock module") {
  const AlgebraSpec alg = AlgebraSpec::heisenberg();
  GradedModule mod(alg);
  mod.build_to(8);

  SUBCASE("Gram blocks are diagonal with the symmetry factors") {
    // |J_{-k}^{m_k} ... O|^2 = prod_k k^{m_k} m_k!.
    for (int lev = 0; lev <= 6; ++lev) {
      const auto& basis = mod.basis(lev);
      const auto& g = mod.gram_matrix(lev);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
          if (i != j) {
            CHECK(g.at(i, j) == 0);
            continue;
          }
          Rational z = 1;
          const auto& parts = basis[i].l_part;
          for (std::size_t t = 0; t < parts.size(); ++t) {
            z *= parts[t];
            std::size_t run = 1;
            while (t + 1 < parts.size() && parts[t + 1] == parts[t]) {
              ++t;
              ++run;
              z *= Rational(static_cast<long>(run)) * parts[t];
            }
          }
          CHECK(g.at(i, i) == z);
        }
      }
    }
  }

  SUBCASE("apply spot values") {
    CHECK(clean(mod.apply_mode(gen_J(1), mono({1}))) == ModuleState{{mono({}), Rational(1)}});
    CHECK(clean(mod.apply_mode(gen_J(2), mono({2}))) == ModuleState{{mono({}), Rational(2)}});
    CHECK(clean(mod.apply_mode(gen_J(1), mono({2}))).empty());
    CHECK(clean(mod.apply_mode(gen_J(0), mono({2, 1}))).empty());
  }

  SUBCASE("Gram blocks agree with direct pairing") { check_gram_matches_pairing(mod, 5); }

  SUBCASE("current relations as matrices") {
    RawBlockCache cache(mod);
    CheckTally total;
    for (int m = -5; m <= 5; ++m)
      for (int n = -5; n <= 5; ++n) total.merge(check_bracket(cache, gen_J(m), gen_J(n), alg, 8));
    CHECK(total.failed == 0);
    CHECK(total.checked >= 500);
  }

  SUBCASE("adjoint identity") {
    for (int k = 1; k <= 3; ++k) check_adjoint_identity_raw(mod, gen_J(k), 5);
  }

  SUBCASE("constructor rejects a nonzero lowest L-weight") {
    CHECK_THROWS_AS(GradedModule(alg, rat(1, 2)), DomainError);
  }
}

TEST_CASE("module action matches symbolic normal ordering") {
  std::mt19937 rng(20250822u);
  auto rint = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  auto run = [&](GradedModule& mod, const AlgebraSpec& alg, bool with_w, int words) {
    std::vector<PBWMonomial> samples;
    for (int lev = 0; lev <= 2; ++lev)
      for (const auto& m : enumerate_basis(alg, lev)) samples.push_back(m);
    for (int t = 0; t < words; ++t) {
      const int len = rint(1, with_w ? 3 : 4);
      std::vector<GeneratorSymbol> factors;
      for (int f = 0; f < len; ++f) {
        const int idx = rint(-3, 3);
        if (alg.kind == AlgebraKind::Heisenberg)
          factors.push_back(gen_J(idx));
        else if (with_w && rint(0, 9) < 5)
          factors.push_back(gen_W(idx));
        else
          factors.push_back(gen_L(idx));
      }
      const ModeWord wd{factors};
      const ModePolynomial ordered = normal_order(ModePolynomial::term(wd, rat(1)), alg);
      for (const auto& m : samples) {
        CHECK(clean(mod.apply_word(wd, m)) == clean(mod.apply_polynomial(ordered, m)));
      }
    }
  };

  SUBCASE("Virasoro") {
    const AlgebraSpec alg = AlgebraSpec::virasoro(rat(7, 2));
    GradedModule mod(alg, rat(1, 6));
    run(mod, alg, false, 25);
  }
  SUBCASE("W3, including repeated W factors") {
    const AlgebraSpec alg = AlgebraSpec::w3(rat(2));
    GradedModule mod(alg, rat(1, 3), rat(1, 7));
    run(mod, alg, true, 25);
  }
  SUBCASE("Heisenberg") {
    const AlgebraSpec alg = AlgebraSpec::heisenberg();
    GradedModule mod(alg);
    run(mod, alg, false, 15);
  }
}

TEST_CASE("Kac positivity reports") {
  SUBCASE("positive points stay positive through level 6") {
    for (const auto& [c, h] : std::vector<std::pair<Rational, Rational>>{
             {rat(2), rat(1, 2)}, {rat(25), rat(3)}}) {
      const auto reports = kac_positivity_report(c, h, 6);
      REQUIRE(reports.size() == 6);
      const std::vector<std::size_t> dims = {1, 2, 3, 5, 7, 11};
      for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(reports[i].level == static_cast<int>(i) + 1);
        CHECK(reports[i].det_sign == 1);
        CHECK(reports[i].rank == dims[i]);
        CHECK(reports[i].min_eigenvalue_estimate > 0.0);
      }
    }
  }

  SUBCASE("degenerate vacuum point c=1, h=0") {
    const auto reports = kac_positivity_report(rat(1), rat(0), 3);
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) CHECK(r.det_sign == 0);
    CHECK(reports[0].rank == 0);
    CHECK(reports[1].rank == 1);
  }

  SUBCASE("first degenerate level at c=1/2, h=1/16") {
    const auto reports = kac_positivity_report(rat(1, 2), rat(1, 16), 2);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].det_sign == 1);
    CHECK(reports[1].det_sign == 0);
    CHECK(reports[1].rank == 1);
  }
}

TEST_CASE("admissible parameter region") {
  CHECK(admissible_region(rat(26), rat(1), rat(0)));
  CHECK_FALSE(admissible_region(rat(26), rat(1), rat(5)));
  CHECK(admissible_region(rat(2), rat(0), rat(0)));
  CHECK_FALSE(admissible_region(rat(26), rat(0), rat(0)));
  // At c=2, h=1/8 the bound is |w| <= 1/48, attained with equality.
  CHECK(admissible_region(rat(2), rat(1, 8), rat(1, 48)));
  CHECK_FALSE(admissible_region(rat(2), rat(1, 8), rat(1, 47)));
  CHECK_THROWS_AS(admissible_region(rat(3, 2), rat(1), rat(0)), DomainError);
}

TEST_CASE("exact linear algebra helpers") {
  RatMat a(2, 2);
  a.at(0, 0) = 2;
  a.at(0, 1) = 3;
  a.at(1, 0) = 1;
  a.at(1, 1) = 5;
  CHECK(det_sign_fraction_free(a) == 1);
  CHECK(rank_exact(a) == 2);

  RatMat b(2, 2);
  b.at(0, 0) = 1;
  b.at(0, 1) = 2;
  b.at(1, 0) = 2;
  b.at(1, 1) = 4;
  CHECK(det_sign_fraction_free(b) == 0);
  CHECK(rank_exact(b) == 1);

  RatMat swap(2, 2);
  swap.at(0, 1) = 1;
  swap.at(1, 0) = 1;
  CHECK(det_sign_fraction_free(swap) == -1);

  RatMat neg(1, 1);
  neg.at(0, 0) = rat(-3, 7);
  CHECK(det_sign_fraction_free(neg) == -1);

  RatMat zero(3, 3);
  CHECK(rank_exact(zero) == 0);
  CHECK(det_sign_fraction_free(zero) == 0);
  CHECK(rank_exact(RatMat::identity(3)) == 3);
}

TEST_CASE("constructor parameter validation") {
  CHECK_THROWS_AS(GradedModule(AlgebraSpec::virasoro(rat(1)), rat(0), rat(1, 3)), DomainError);
}
