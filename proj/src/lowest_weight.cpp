#include "walg/lowest_weight.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <deque>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace walg {

// ---------------------------------------------------------------------------
// Partitions and basis enumeration
// ---------------------------------------------------------------------------

namespace {

void gen_partitions(int n, int max_part, std::vector<int>& acc,
                    std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(acc);
    return;
  }
  for (int p = 1; p <= std::min(n, max_part); ++p) {
    acc.push_back(p);
    gen_partitions(n - p, p, acc, out);
    acc.pop_back();
  }
}

}  // namespace

const std::vector<std::vector<int>>& integer_partitions(int n) {
  if (n < 0) throw DomainError("integer_partitions: negative argument");
  // Deque keeps references to already-cached levels valid while new levels
  // are appended, so the returned reference stays good after the lock is
  // released; the mutex makes the cache safe for concurrent suite runners.
  static std::mutex cache_mutex;
  static std::deque<std::vector<std::vector<int>>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  while (static_cast<int>(cache.size()) <= n) {
    const int m = static_cast<int>(cache.size());
    std::vector<std::vector<int>> parts;
    std::vector<int> acc;
    gen_partitions(m, m, acc, parts);
    cache.push_back(std::move(parts));
  }
  return cache[n];
}

int PBWMonomial::level() const {
  return std::accumulate(l_part.begin(), l_part.end(), 0) +
         std::accumulate(w_part.begin(), w_part.end(), 0);
}

std::string to_string(const PBWMonomial& m, AlgebraKind kind) {
  if (m.is_vacuum()) return "Omega";
  const char* lname = kind == AlgebraKind::Heisenberg ? "J" : "L";
  std::ostringstream os;
  auto emit = [&os](const char* name, const std::vector<int>& part) {
    for (std::size_t i = 0; i < part.size();) {
      std::size_t j = i;
      while (j < part.size() && part[j] == part[i]) ++j;
      if (os.tellp() > 0) os << " ";
      os << name << "[" << -part[i] << "]";
      if (j - i > 1) os << "^" << (j - i);
      i = j;
    }
  };
  emit(lname, m.l_part);
  emit("W", m.w_part);
  return os.str();
}

std::vector<PBWMonomial> enumerate_basis(const AlgebraSpec& alg, int level) {
  if (level < 0) throw DomainError("enumerate_basis: negative level");
  std::vector<PBWMonomial> out;
  if (alg.kind == AlgebraKind::W3) {
    for (int a = level; a >= 0; --a) {
      for (const auto& lp : integer_partitions(a))
        for (const auto& wp : integer_partitions(level - a)) out.push_back({lp, wp});
    }
  } else {
    for (const auto& lp : integer_partitions(level)) out.push_back({lp, {}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quotient solve
// ---------------------------------------------------------------------------

std::vector<Rational> QuotientData::solve(std::vector<Rational> rhs) const {
  if (rhs.size() != rank) throw DomainError("QuotientData::solve: rhs size mismatch");
  const std::size_t r = rank;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < i; ++k) rhs[i] -= ldl_rows[i][k] * rhs[k];
  for (std::size_t i = 0; i < r; ++i) rhs[i] /= ldl_diag[i];
  for (std::size_t i = r; i-- > 0;)
    for (std::size_t k = i + 1; k < r; ++k) rhs[i] -= ldl_rows[k][i] * rhs[k];
  return rhs;
}

// ---------------------------------------------------------------------------
// Module engine
// ---------------------------------------------------------------------------

namespace {

struct ApplyKey {
  Family family;
  int index;
  PBWMonomial mono;

  friend bool operator==(const ApplyKey&, const ApplyKey&) = default;
};

struct ApplyKeyHash {
  std::size_t operator()(const ApplyKey& k) const {
    std::size_t h = 1469598103934665603ull;
    auto mix = [&h](std::size_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(static_cast<std::size_t>(k.family));
    mix(static_cast<std::size_t>(k.index + 64));
    for (int p : k.mono.l_part) mix(static_cast<std::size_t>(p));
    mix(0xabcdull);
    for (int p : k.mono.w_part) mix(static_cast<std::size_t>(p));
    return h;
  }
};

void validate_monomial(const PBWMonomial& m, const AlgebraSpec& alg) {
  auto check = [](const std::vector<int>& part) {
    for (std::size_t i = 0; i < part.size(); ++i) {
      if (part[i] <= 0) throw DomainError("PBW monomial indices must be positive");
      if (i > 0 && part[i] > part[i - 1])
        throw DomainError("PBW monomial parts must be weakly decreasing");
    }
  };
  check(m.l_part);
  check(m.w_part);
  if (!m.w_part.empty() && alg.kind != AlgebraKind::W3)
    throw DomainError("W factors require the W3 algebra");
}

int polynomial_grade(const ModePolynomial& p) {
  if (p.is_zero()) throw DomainError("grade of the zero polynomial is undefined");
  const int g = p.terms().begin()->first.level();
  for (const auto& [word, coeff] : p.terms())
    if (word.level() != g) throw DomainError("polynomial is not homogeneous in grade");
  return g;
}

void add_scaled(ModuleState& dst, const ModuleState& src, const Rational& s) {
  if (s == 0) return;
  for (const auto& [mono, c] : src) {
    auto it = dst.find(mono);
    if (it == dst.end()) {
      dst.emplace(mono, c * s);
    } else {
      it->second += c * s;
      if (it->second == 0) dst.erase(it);
    }
  }
}

}  // namespace

struct GradedModule::Impl {
  AlgebraSpec alg;
  Rational h;
  Rational w;
  Family lfam;  // family stored in l_part: J for Heisenberg, L otherwise

  struct LevelData {
    std::vector<PBWMonomial> basis;
    std::map<PBWMonomial, std::size_t> index;
    RatMat gram;
    std::optional<QuotientData> quotient;
  };
  std::vector<LevelData> levels;

  std::unordered_map<ApplyKey, ModuleState, ApplyKeyHash> cache;

  Impl(AlgebraSpec a, Rational h_in, Rational w_in)
      : alg(std::move(a)),
        h(std::move(h_in)),
        w(std::move(w_in)),
        lfam(alg.kind == AlgebraKind::Heisenberg ? Family::J : Family::L) {}

  bool family_allowed(Family f) const {
    switch (f) {
      case Family::One: return true;
      case Family::Z: return alg.kind == AlgebraKind::Heisenberg;
      case Family::L:
      case Family::LSq: return alg.kind != AlgebraKind::Heisenberg;
      case Family::W: return alg.kind == AlgebraKind::W3;
      case Family::J: return alg.kind == AlgebraKind::Heisenberg;
    }
    return false;
  }

  GeneratorSymbol lead_symbol(const PBWMonomial& m) const {
    if (!m.l_part.empty()) return {lfam, -m.l_part.front()};
    return {Family::W, -m.w_part.front()};
  }

  static PBWMonomial strip_lead(const PBWMonomial& m) {
    PBWMonomial r = m;
    if (!r.l_part.empty())
      r.l_part.erase(r.l_part.begin());
    else
      r.w_part.erase(r.w_part.begin());
    return r;
  }

  // L_{-a} (J_{-a} for Heisenberg) times a monomial, straightened into the
  // PBW basis.  Prepending is legal once a >= leading part; otherwise commute
  // past the leading factor and re-insert it.
  ModuleState insert_l(int a, const PBWMonomial& m) {
    if (alg.kind == AlgebraKind::Heisenberg) {
      PBWMonomial r = m;
      auto pos = std::upper_bound(r.l_part.begin(), r.l_part.end(), a, std::greater<int>());
      r.l_part.insert(pos, a);
      return {{std::move(r), Rational(1)}};
    }
    if (m.l_part.empty() || a >= m.l_part.front()) {
      PBWMonomial r = m;
      r.l_part.insert(r.l_part.begin(), a);
      return {{std::move(r), Rational(1)}};
    }
    const int n1 = m.l_part.front();
    const PBWMonomial rest = strip_lead(m);
    ModuleState out;
    for (const auto& [mono, c] : apply(gen_L(-a), rest))
      add_scaled(out, apply(gen_L(-n1), mono), c);
    // [L_{-a}, L_{-n1}] = (n1 - a) L_{-(a+n1)}
    add_scaled(out, apply(gen_L(-(a + n1)), rest), Rational(n1 - a));
    return out;
  }

  // W_{-a} times a monomial.  W factors sit to the right of all L factors, so
  // the operator is commuted past the whole L run first.
  ModuleState insert_w(int a, const PBWMonomial& m) {
    if (!m.l_part.empty()) {
      const int n1 = m.l_part.front();
      const PBWMonomial rest = strip_lead(m);
      ModuleState out;
      for (const auto& [mono, c] : apply(gen_W(-a), rest))
        add_scaled(out, apply(gen_L(-n1), mono), c);
      // [W_{-a}, L_{-n1}] = (2 n1 - a) W_{-(a+n1)}
      add_scaled(out, apply(gen_W(-(a + n1)), rest), Rational(2 * n1 - a));
      return out;
    }
    if (m.w_part.empty() || a >= m.w_part.front()) {
      PBWMonomial r = m;
      r.w_part.insert(r.w_part.begin(), a);
      return {{std::move(r), Rational(1)}};
    }
    const int m1 = m.w_part.front();
    const PBWMonomial rest = strip_lead(m);
    ModuleState out;
    for (const auto& [mono, c] : apply(gen_W(-a), rest))
      add_scaled(out, apply(gen_W(-m1), mono), c);
    const ModePolynomial comm = commutator(gen_W(-a), gen_W(-m1), alg);
    for (const auto& [word, c] : comm.terms()) add_scaled(out, apply_word_on(word, rest), c);
    return out;
  }

  // Non-raising mode on a monomial: commute rightward until it reaches the
  // lowest-weight vector.
  ModuleState lower(Family f, int k, const PBWMonomial& m) {
    if (m.is_vacuum()) {
      if (k > 0) return {};
      if (f == Family::L && h != 0) return {{m, h}};
      if (f == Family::W && w != 0) return {{m, w}};
      return {};
    }
    const GeneratorSymbol g{f, k};
    const GeneratorSymbol f1 = lead_symbol(m);
    const PBWMonomial rest = strip_lead(m);
    ModuleState out;
    for (const auto& [mono, c] : apply(g, rest)) add_scaled(out, apply(f1, mono), c);
    const ModePolynomial comm = commutator(g, f1, alg);
    for (const auto& [word, c] : comm.terms()) add_scaled(out, apply_word_on(word, rest), c);
    return out;
  }

  ModuleState apply(GeneratorSymbol g, const PBWMonomial& m) {
    if (!family_allowed(g.family))
      throw DomainError("generator " + to_string(g) + " is not part of the " +
                        to_string(alg.kind) + " algebra");
    if (g.is_central()) return {{m, Rational(1)}};
    if (g.family == Family::L && g.index == 0) return {{m, h + m.level()}};
    if (g.family == Family::J && g.index == 0) return {};

    ApplyKey key{g.family, g.index, m};
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    ModuleState res;
    if (g.family == Family::LSq) {
      for (const auto& [a, b] : wick_square_expansion(g.index, m.level()))
        for (const auto& [mono, c] : apply(gen_L(b), m)) add_scaled(res, apply(gen_L(a), mono), c);
    } else if (g.index < 0) {
      res = g.family == Family::W ? insert_w(-g.index, m) : insert_l(-g.index, m);
    } else {
      res = lower(g.family, g.index, m);
    }
    return cache.emplace(std::move(key), std::move(res)).first->second;
  }

  ModuleState apply_to_state(GeneratorSymbol g, const ModuleState& s) {
    ModuleState out;
    for (const auto& [mono, c] : s) add_scaled(out, apply(g, mono), c);
    return out;
  }

  ModuleState apply_word_on(const ModeWord& word, const PBWMonomial& m) {
    ModuleState state{{m, Rational(1)}};
    for (auto it = word.factors.rbegin(); it != word.factors.rend(); ++it)
      state = apply_to_state(*it, state);
    return state;
  }

  ModuleState apply_poly_on(const ModePolynomial& p, const PBWMonomial& m) {
    ModuleState out;
    for (const auto& [word, c] : p.terms()) add_scaled(out, apply_word_on(word, m), c);
    return out;
  }

  std::vector<GeneratorSymbol> factors_of(const PBWMonomial& m) const {
    std::vector<GeneratorSymbol> fs;
    for (int n : m.l_part) fs.push_back({lfam, -n});
    for (int n : m.w_part) fs.push_back({Family::W, -n});
    return fs;
  }

  Rational pairing(const PBWMonomial& a, const PBWMonomial& b) {
    if (a.level() != b.level()) return Rational(0);
    ModuleState state{{b, Rational(1)}};
    for (const GeneratorSymbol& f : factors_of(a))
      state = apply_to_state({f.family, -f.index}, state);
    auto it = state.find(PBWMonomial{});
    return it == state.end() ? Rational(0) : it->second;
  }

  LevelData& level_at(int lev) {
    if (lev < 0 || lev >= static_cast<int>(levels.size())) {
      std::ostringstream os;
      os << "level " << lev << " is not built (max built "
         << static_cast<int>(levels.size()) - 1 << ")";
      throw RangeError(os.str());
    }
    return levels[lev];
  }

  void build_to(int target) {
    if (target < 0) throw DomainError("build_to: negative level");
    for (int lev = static_cast<int>(levels.size()); lev <= target; ++lev) build_level(lev);
  }

  void build_level(int lev) {
    LevelData ld;
    ld.basis = enumerate_basis(alg, lev);
    for (std::size_t i = 0; i < ld.basis.size(); ++i) ld.index.emplace(ld.basis[i], i);
    const std::size_t d = ld.basis.size();
    ld.gram = RatMat(d, d);
    if (lev == 0) {
      ld.gram.at(0, 0) = Rational(1);
      levels.push_back(std::move(ld));
      return;
    }

    // <v_i, v_j> = <strip(v_i), adj(lead(v_i)) v_j>, reducing each entry to a
    // sparse dot product against an already-built lower Gram block.  Rows are
    // grouped by leading factor so the adjoint application of each column is
    // computed and compacted once per distinct lead.
    std::map<GeneratorSymbol, std::vector<std::size_t>> rows_by_lead;
    for (std::size_t i = 0; i < d; ++i) rows_by_lead[lead_symbol(ld.basis[i])].push_back(i);

    for (const auto& [lead, rows] : rows_by_lead) {
      const int a = -lead.index;
      const LevelData& prev = levels[lev - a];
      const GeneratorSymbol adj{lead.family, a};
      std::vector<std::vector<std::pair<std::size_t, Rational>>> cols(d);
      std::vector<char> col_done(d, 0);
      for (std::size_t i : rows) {
        const std::size_t strip_idx = prev.index.at(strip_lead(ld.basis[i]));
        for (std::size_t j = i; j < d; ++j) {
          if (!col_done[j]) {
            for (const auto& [mono, c] : apply(adj, ld.basis[j]))
              cols[j].emplace_back(prev.index.at(mono), c);
            col_done[j] = 1;
          }
          Rational acc(0);
          for (const auto& [idx, c] : cols[j]) acc += c * prev.gram.at(strip_idx, idx);
          ld.gram.at(i, j) = acc;
          ld.gram.at(j, i) = std::move(acc);
        }
      }
    }
    levels.push_back(std::move(ld));
  }

  QuotientData compute_quotient(const RatMat& G, int lev) const {
    const std::size_t d = G.rows();
    QuotientData q;
    q.selected_pos.assign(d, -1);
    q.null_coeffs.resize(d);

    auto make_witness = [&](const std::vector<Rational>& coords) {
      std::vector<std::string> out;
      out.reserve(d);
      for (const auto& c : coords) out.push_back(to_string(c));
      return out;
    };
    auto negative_error = [&](const std::vector<Rational>& coords) {
      std::ostringstream os;
      os << "Gram block at level " << lev << " is not positive semidefinite";
      return NegativeFormError(os.str(), make_witness(coords));
    };

    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t r = q.selected.size();
      // z solves L z = G[j, selected]; then x = L^{-T} D^{-1} z solves
      // G[sel, sel] x = G[sel, j], and the Schur residual is
      // G[j, j] - sum z_i^2 / D_i.
      std::vector<Rational> z(r);
      for (std::size_t i = 0; i < r; ++i) {
        z[i] = G.at(j, q.selected[i]);
        for (std::size_t k = 0; k < i; ++k) z[i] -= q.ldl_rows[i][k] * z[k];
      }
      Rational resid = G.at(j, j);
      for (std::size_t i = 0; i < r; ++i) resid -= z[i] * z[i] / q.ldl_diag[i];

      if (resid > 0) {
        std::vector<Rational> lrow(r);
        for (std::size_t i = 0; i < r; ++i) lrow[i] = z[i] / q.ldl_diag[i];
        q.ldl_rows.push_back(std::move(lrow));
        q.ldl_diag.push_back(std::move(resid));
        q.selected_pos[j] = static_cast<std::ptrdiff_t>(r);
        q.selected.push_back(j);
        continue;
      }

      std::vector<Rational> x(r);
      for (std::size_t i = 0; i < r; ++i) x[i] = z[i] / q.ldl_diag[i];
      for (std::size_t i = r; i-- > 0;)
        for (std::size_t k = i + 1; k < r; ++k) x[i] -= q.ldl_rows[k][i] * x[k];

      if (resid < 0) {
        std::vector<Rational> coords(d, Rational(0));
        coords[j] = Rational(1);
        for (std::size_t i = 0; i < r; ++i) coords[q.selected[i]] = -x[i];
        throw negative_error(coords);
      }
      q.null_coeffs[j] = std::move(x);
    }
    q.rank = q.selected.size();

    // Certification: each null vector must pair to zero with everything, not
    // just with the vectors selected before it.  A violation yields an exact
    // negative direction even though every pivot so far was >= 0 (the
    // [[0,1],[1,0]] trap), so it is reported as NegativeForm, not as a bug.
    for (std::size_t j = 0; j < d; ++j) {
      if (q.selected_pos[j] >= 0) continue;
      const auto& x = q.null_coeffs[j];
      for (std::size_t t = j + 1; t < d; ++t) {
        Rational rhs(0);
        for (std::size_t s = 0; s < x.size(); ++s) rhs += x[s] * G.at(q.selected[s], t);
        const Rational e = G.at(j, t) - rhs;
        if (e == 0) continue;
        std::vector<Rational> coords(d, Rational(0));
        coords[j] = Rational(1);
        for (std::size_t s = 0; s < x.size(); ++s) coords[q.selected[s]] -= x[s];
        if (q.selected_pos[t] < 0) {
          // <u_j, u_j> = <u_t, u_t> = 0, <u_j, u_t> = e: u_j -+ u_t is negative.
          const Rational sign = e > 0 ? Rational(1) : Rational(-1);
          coords[t] -= sign;
          const auto& xt = q.null_coeffs[t];
          for (std::size_t s = 0; s < xt.size(); ++s) coords[q.selected[s]] += sign * xt[s];
        } else {
          // <u_j, u_j> = 0, <u_j, e_t> = e: s u_j + e_t with
          // s = -(G_tt + 1)/(2e) has norm -1.
          const Rational s0 = -(G.at(t, t) + 1) / (2 * e);
          for (auto& cval : coords) cval *= s0;
          coords[t] += 1;
        }
        throw negative_error(coords);
      }
    }

    // Null vectors verified orthogonal to the later-selected directions, so
    // their projections extend by zeros to the full selected set.
    for (std::size_t j = 0; j < d; ++j)
      if (q.selected_pos[j] < 0) q.null_coeffs[j].resize(q.rank, Rational(0));
    return q;
  }

  const QuotientData& quotient(int lev) {
    LevelData& ld = level_at(lev);
    if (!ld.quotient) ld.quotient = compute_quotient(ld.gram, lev);
    return *ld.quotient;
  }

  RatMat project_columns(int from, int target,
                         const std::vector<ModuleState>& images) {
    const QuotientData& qf = *levels[from].quotient;
    if (target < 0) return RatMat(0, qf.rank);
    const QuotientData& qt = quotient(target);
    const LevelData& tl = levels[target];
    RatMat out(qt.rank, qf.rank);
    if (qt.rank == tl.basis.size()) {
      // Trivial radical: quotient coordinates are the raw PBW coefficients.
      for (std::size_t col = 0; col < images.size(); ++col)
        for (const auto& [mono, c] : images[col]) out.at(tl.index.at(mono), col) = c;
      return out;
    }
    for (std::size_t col = 0; col < images.size(); ++col) {
      std::vector<Rational> rhs(qt.rank, Rational(0));
      for (const auto& [mono, c] : images[col]) {
        const std::size_t idx = tl.index.at(mono);
        for (std::size_t t = 0; t < qt.rank; ++t)
          rhs[t] += c * tl.gram.at(qt.selected[t], idx);
      }
      std::vector<Rational> x = qt.solve(std::move(rhs));
      for (std::size_t t = 0; t < qt.rank; ++t) out.at(t, col) = std::move(x[t]);
    }
    return out;
  }

  void check_target_built(int target) const {
    if (target > static_cast<int>(levels.size()) - 1) {
      std::ostringstream os;
      os << "target level " << target << " is not built (max built "
         << static_cast<int>(levels.size()) - 1 << ")";
      throw RangeError(os.str());
    }
  }

  // The action maps the radical into the radical (the form is invariant), so
  // projecting images of the selected representatives onto the selected span
  // is exactly the quotient action.
  RatMat mode_matrix_grade(int grade, int from,
                           const std::function<ModuleState(const PBWMonomial&)>& act) {
    level_at(from);
    const int target = from + grade;
    check_target_built(target);
    const QuotientData& qf = quotient(from);
    std::vector<ModuleState> images;
    images.reserve(qf.rank);
    for (std::size_t s : qf.selected) images.push_back(act(levels[from].basis[s]));
    return project_columns(from, target, images);
  }

  RatMat mode_matrix_raw_grade(int grade, int from,
                               const std::function<ModuleState(const PBWMonomial&)>& act) {
    const LevelData& fl = level_at(from);
    const int target = from + grade;
    if (target < 0) return RatMat(0, fl.basis.size());
    check_target_built(target);
    const LevelData& tl = levels[target];
    RatMat out(tl.basis.size(), fl.basis.size());
    for (std::size_t j = 0; j < fl.basis.size(); ++j)
      for (const auto& [mono, c] : act(fl.basis[j])) out.at(tl.index.at(mono), j) = c;
    return out;
  }
};

// ---------------------------------------------------------------------------
// GradedModule interface
// ---------------------------------------------------------------------------

GradedModule::GradedModule(AlgebraSpec alg, Rational h, Rational w) {
  if (alg.kind != AlgebraKind::W3 && w != 0)
    throw DomainError("lowest weight w requires the W3 algebra");
  if (alg.kind == AlgebraKind::Heisenberg && h != 0)
    throw DomainError("the Heisenberg Fock module has lowest weight 0");
  if (alg.kind == AlgebraKind::W3) (void)alg.b_sq();  // rejects c = -22/5
  impl_ = std::make_unique<Impl>(std::move(alg), std::move(h), std::move(w));
}

GradedModule::~GradedModule() = default;
GradedModule::GradedModule(GradedModule&&) noexcept = default;
GradedModule& GradedModule::operator=(GradedModule&&) noexcept = default;

const AlgebraSpec& GradedModule::algebra() const { return impl_->alg; }
const Rational& GradedModule::lowest_h() const { return impl_->h; }
const Rational& GradedModule::lowest_w() const { return impl_->w; }

void GradedModule::build_to(int max_level) { impl_->build_to(max_level); }

int GradedModule::max_built() const { return static_cast<int>(impl_->levels.size()) - 1; }

const std::vector<PBWMonomial>& GradedModule::basis(int level) const {
  return impl_->level_at(level).basis;
}

std::size_t GradedModule::dim(int level) const { return impl_->level_at(level).basis.size(); }

std::size_t GradedModule::basis_index(int level, const PBWMonomial& m) const {
  const auto& ld = impl_->level_at(level);
  auto it = ld.index.find(m);
  if (it == ld.index.end()) throw DomainError("monomial is not a basis element of the level");
  return it->second;
}

const RatMat& GradedModule::gram_matrix(int level) const { return impl_->level_at(level).gram; }

const QuotientData& GradedModule::radical_quotient(int level) { return impl_->quotient(level); }

std::size_t GradedModule::quotient_rank(int level) { return impl_->quotient(level).rank; }

Rational GradedModule::vacuum_expectation(const PBWMonomial& a, const PBWMonomial& b) {
  validate_monomial(a, impl_->alg);
  validate_monomial(b, impl_->alg);
  return impl_->pairing(a, b);
}

ModuleState GradedModule::apply_mode(GeneratorSymbol g, const PBWMonomial& m) {
  validate_monomial(m, impl_->alg);
  return impl_->apply(g, m);
}

ModuleState GradedModule::apply_mode(GeneratorSymbol g, const ModuleState& s) {
  for (const auto& kv : s) validate_monomial(kv.first, impl_->alg);
  return impl_->apply_to_state(g, s);
}

ModuleState GradedModule::apply_word(const ModeWord& word, const PBWMonomial& m) {
  validate_monomial(m, impl_->alg);
  return impl_->apply_word_on(word, m);
}

ModuleState GradedModule::apply_polynomial(const ModePolynomial& p, const PBWMonomial& m) {
  validate_monomial(m, impl_->alg);
  return impl_->apply_poly_on(p, m);
}

RatMat GradedModule::mode_matrix(GeneratorSymbol g, int from_level) {
  return impl_->mode_matrix_grade(g.grade(), from_level, [this, g](const PBWMonomial& m) {
    return impl_->apply(g, m);
  });
}

RatMat GradedModule::mode_matrix(const ModePolynomial& p, int from_level) {
  const int grade = polynomial_grade(p);
  return impl_->mode_matrix_grade(grade, from_level, [this, &p](const PBWMonomial& m) {
    return impl_->apply_poly_on(p, m);
  });
}

RatMat GradedModule::mode_matrix_raw(GeneratorSymbol g, int from_level) {
  return impl_->mode_matrix_raw_grade(g.grade(), from_level, [this, g](const PBWMonomial& m) {
    return impl_->apply(g, m);
  });
}

RatMat GradedModule::mode_matrix_raw(const ModePolynomial& p, int from_level) {
  const int grade = polynomial_grade(p);
  return impl_->mode_matrix_raw_grade(grade, from_level, [this, &p](const PBWMonomial& m) {
    return impl_->apply_poly_on(p, m);
  });
}

// ---------------------------------------------------------------------------
// Level-block operators
// ---------------------------------------------------------------------------

namespace {

LevelBlockOperator build_blocks(GradedModule& mod, ModePolynomial symbol, int grade, int min_from,
                                int max_from,
                                const std::function<RatMat(int)>& matrix_at) {
  LevelBlockOperator op;
  op.symbol = std::move(symbol);
  op.grade = grade;
  for (int f = min_from; f <= max_from; ++f) {
    if (f < 0 || f > mod.max_built()) continue;
    const int t = f + grade;
    if (t < 0 || t > mod.max_built()) continue;
    op.blocks.emplace(f, matrix_at(f));
  }
  return op;
}

}  // namespace

LevelBlockOperator block_operator(GradedModule& mod, GeneratorSymbol g, int min_from,
                                  int max_from) {
  return build_blocks(mod, ModePolynomial::generator(g), g.grade(), min_from, max_from,
                      [&](int f) { return mod.mode_matrix(g, f); });
}

LevelBlockOperator block_operator(GradedModule& mod, const ModePolynomial& p, int min_from,
                                  int max_from) {
  return build_blocks(mod, p, polynomial_grade(p), min_from, max_from,
                      [&](int f) { return mod.mode_matrix(p, f); });
}

// ---------------------------------------------------------------------------
// Exact linear algebra helpers
// ---------------------------------------------------------------------------

int det_sign_fraction_free(const RatMat& m) {
  if (m.rows() != m.cols()) throw DomainError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;

  // Denominators cleared row by row (positive scalings keep the sign), then
  // one-step Bareiss elimination over the integers.
  std::vector<mpz_class> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class row_lcm = 1;
    for (std::size_t j = 0; j < n; ++j) {
      mpz_class den = m.at(i, j).get_den();
      mpz_lcm(row_lcm.get_mpz_t(), row_lcm.get_mpz_t(), den.get_mpz_t());
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& q = m.at(i, j);
      a[i * n + j] = q.get_num() * (row_lcm / q.get_den());
    }
  }

  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a[piv * n + k] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a[piv * n + j], a[k * n + j]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class num = a[k * n + k] * a[i * n + j] - a[i * n + k] * a[k * n + j];
        mpz_divexact(a[i * n + j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      a[i * n + k] = 0;
    }
    prev = a[k * n + k];
  }
  return sign * sgn(a[n * n - 1]);
}

std::size_t rank_exact(RatMat m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t piv = r;
    while (piv < rows && m.at(piv, col) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r)
      for (std::size_t j = col; j < cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m.at(i, col) == 0) continue;
      const Rational f = m.at(i, col) / m.at(r, col);
      for (std::size_t j = col; j < cols; ++j) m.at(i, j) -= f * m.at(r, j);
    }
    ++r;
  }
  return r;
}

bool is_positive_semidefinite_exact(RatMat m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw DomainError("psd check needs a square matrix");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (m.at(i, j) != m.at(j, i)) throw DomainError("psd check needs a symmetric matrix");
  std::vector<bool> done(n, false);
  for (;;) {
    std::size_t piv = n;
    for (std::size_t i = 0; i < n && piv == n; ++i)
      if (!done[i] && m.at(i, i) != 0) piv = i;
    if (piv == n) {
      // All remaining diagonal entries vanish; any surviving off-diagonal
      // entry then gives a 2x2 principal minor with negative determinant.
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!done[j] && m.at(i, j) != 0) return false;
      }
      return true;
    }
    if (m.at(piv, piv) < 0) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] || i == piv || m.at(i, piv) == 0) continue;
      const Rational f = m.at(i, piv) / m.at(piv, piv);
      for (std::size_t j = 0; j < n; ++j) {
        if (done[j]) continue;
        m.at(i, j) -= f * m.at(piv, j);
      }
    }
    done[piv] = true;
  }
}

// ---------------------------------------------------------------------------
// Positivity reports
// ---------------------------------------------------------------------------

std::vector<KacLevelReport> kac_positivity_report(const Rational& c, const Rational& h,
                                                  int max_level) {
  if (max_level < 0) throw DomainError("kac_positivity_report: negative level");
  GradedModule mod(AlgebraSpec::virasoro(c), h);
  mod.build_to(max_level);
  std::vector<KacLevelReport> out;
  for (int lev = 1; lev <= max_level; ++lev) {
    const RatMat& G = mod.gram_matrix(lev);
    KacLevelReport rep;
    rep.level = lev;
    rep.det_sign = det_sign_fraction_free(G);
    rep.rank = rank_exact(G);
    const std::size_t d = G.rows();
    Eigen::MatrixXd gd(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) gd(i, j) = to_double(G.at(i, j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gd, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue_estimate = es.eigenvalues().minCoeff();
    out.push_back(std::move(rep));
  }
  return out;
}

bool admissible_region(const Rational& c, const Rational& h, const Rational& w) {
  if (c < 2) throw DomainError("admissible region requires central charge >= 2");
  if (h < (c - 2) / 24) return false;
  const Rational base = 2 * h - (c - 2) / 12;
  if (base < 0) return false;
  // |w| <= sqrt(8/(198+45c)) base^{3/2}, compared by exact squaring.
  return w * w * (198 + 45 * c) <= 8 * base * base * base;
}

}  // namespace walg
