#include "walg/oscillator.hpp"

#include <algorithm>
#include <functional>
#include <type_traits>

#include "walg/lowest_weight.hpp"

namespace walg {

// ---------------------------------------------------------------------------
// Partitions and vectors
// ---------------------------------------------------------------------------

int fock_level(const FockPartition& p) {
  int level = 0;
  for (int part : p) level += part;
  return level;
}

Rational fock_norm_sq(const FockPartition& p) {
  Rational out(1);
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i;
    while (j < p.size() && p[j] == p[i]) ++j;
    for (std::size_t m = 1; m <= j - i; ++m) out *= Rational(p[i]) * Rational(long(m));
    i = j;
  }
  return out;
}

const std::vector<FockPartition>& fock_basis(int level) { return integer_partitions(level); }

FockVector fock_unit(FockPartition parts) {
  for (int part : parts)
    if (part <= 0) throw DomainError("Fock partition parts must be positive");
  std::sort(parts.begin(), parts.end(), std::greater<int>());
  FockVector v;
  v.emplace(std::move(parts), GaussianRational(Rational(1)));
  return v;
}

void fock_add_scaled(FockVector& dst, const FockVector& src, const GaussianRational& scale) {
  if (scale.is_zero()) return;
  for (const auto& [part, coeff] : src) {
    auto it = dst.try_emplace(part).first;
    it->second += scale * coeff;
    if (it->second.is_zero()) dst.erase(it);
  }
}

GaussianRational fock_pair(const FockVector& a, const FockVector& b) {
  GaussianRational out;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      out += fock_norm_sq(ia->first) * (ia->second.conj() * ib->second);
      ++ia;
      ++ib;
    }
  }
  return out;
}

FockVector truncate_above(FockVector v, int cutoff) {
  for (auto it = v.begin(); it != v.end();) {
    if (fock_level(it->first) > cutoff)
      it = v.erase(it);
    else
      ++it;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Current modes
// ---------------------------------------------------------------------------

namespace {

// J_n on a single partition; the result has at most one term.
void j_on_partition(int n, const FockPartition& part, const GaussianRational& coeff,
                    FockVector& out) {
  if (n == 0) return;
  if (n < 0) {
    FockPartition next;
    next.reserve(part.size() + 1);
    const int inserted = -n;
    bool placed = false;
    for (int p : part) {
      if (!placed && p < inserted) {
        next.push_back(inserted);
        placed = true;
      }
      next.push_back(p);
    }
    if (!placed) next.push_back(inserted);
    fock_add_scaled(out, FockVector{{std::move(next), GaussianRational(Rational(1))}}, coeff);
    return;
  }
  const auto lo = std::lower_bound(part.begin(), part.end(), n, std::greater<int>());
  const auto hi = std::upper_bound(part.begin(), part.end(), n, std::greater<int>());
  const long mult = hi - lo;
  if (mult == 0) return;
  FockPartition next(part.begin(), lo);
  next.insert(next.end(), lo + 1, part.end());
  fock_add_scaled(out, FockVector{{std::move(next), GaussianRational(Rational(1))}},
                  Rational(long(n) * mult) * coeff);
}

}  // namespace

FockVector j_apply(int n, const FockVector& v) {
  FockVector out;
  for (const auto& [part, coeff] : v) j_on_partition(n, part, coeff, out);
  return out;
}

FockVector jminus_apply(const FockVector& v, int cutoff) {
  FockVector out;
  for (const auto& [part, coeff] : v) {
    std::size_t i = 0;
    while (i < part.size()) {
      std::size_t j = i;
      while (j < part.size() && part[j] == part[i]) ++j;
      j_on_partition(part[i], part, coeff, out);
      i = j;
    }
  }
  return truncate_above(std::move(out), cutoff);
}

FockVector jprime_apply(const FockVector& v, int cutoff) {
  FockVector out;
  for (const auto& [part, coeff] : v) {
    std::size_t i = 0;
    while (i < part.size()) {
      std::size_t j = i;
      while (j < part.size() && part[j] == part[i]) ++j;
      j_on_partition(part[i], part, Rational(part[i]) * coeff, out);
      i = j;
    }
  }
  return truncate_above(std::move(out), cutoff);
}

// ---------------------------------------------------------------------------
// Sugawara action
// ---------------------------------------------------------------------------

FockVector sugawara_apply(int n, const FockVector& v, int cutoff) {
  FockVector out;
  const Rational half(1, 2);
  for (const auto& [part, coeff] : v) {
    const int level = fock_level(part);
    const FockVector unit{{part, GaussianRational(Rational(1))}};
    // k > -1 leg J_{n-k} J_k: k = 0 dies on the charge-zero sector and
    // k > level annihilates, so 1 <= k <= level.
    for (int k = 1; k <= level; ++k) {
      if (n == k) continue;
      FockVector inner = j_apply(k, unit);
      if (inner.empty()) continue;
      fock_add_scaled(out, j_apply(n - k, inner), half * coeff);
    }
    // k <= -1 leg J_k J_{n-k}: the right factor J_{n-k} annihilates for
    // n - k > level, so k >= n - level.
    for (int k = -1; k >= n - level; --k) {
      if (n == k) continue;
      FockVector inner = j_apply(n - k, unit);
      if (inner.empty()) continue;
      fock_add_scaled(out, j_apply(k, inner), half * coeff);
    }
  }
  return truncate_above(std::move(out), cutoff);
}

namespace {

Rational real_part_checked(const GaussianRational& z) {
  if (!z.is_real()) throw DomainError("expected a real coefficient");
  return z.re;
}

template <typename Scalar, typename Apply>
Mat<Scalar> mode_matrix_impl(int n, int from, Apply&& apply) {
  // Either level below 0 is the zero space: its side gets 0 rows or columns,
  // so compositions through it still come out with the right outer shape.
  const int to = from - n;
  const std::size_t rows = to < 0 ? 0 : fock_basis(to).size();
  const std::size_t cols = from < 0 ? 0 : fock_basis(from).size();
  Mat<Scalar> out(rows, cols);
  if (rows == 0 || cols == 0) return out;
  const auto& source = fock_basis(from);
  const auto& target = fock_basis(to);
  std::map<FockPartition, std::size_t> index;
  for (std::size_t i = 0; i < target.size(); ++i) index.emplace(target[i], i);
  for (std::size_t j = 0; j < cols; ++j) {
    const FockVector image = apply(FockVector{{source[j], GaussianRational(Rational(1))}}, to);
    for (const auto& [part, coeff] : image) {
      if constexpr (std::is_same_v<Scalar, Rational>)
        out.at(index.at(part), j) = real_part_checked(coeff);
      else
        out.at(index.at(part), j) = coeff;
    }
  }
  return out;
}

}  // namespace

RatMat sugawara_mode_matrix(int n, int from) {
  return mode_matrix_impl<Rational>(
      n, from, [n](const FockVector& v, int cutoff) { return sugawara_apply(n, v, cutoff); });
}

// ---------------------------------------------------------------------------
// Deformed family
// ---------------------------------------------------------------------------

Rational DeformationParams::h() const {
  Rational out = kappa.squared() + eta.squared();
  out /= 2;
  return out;
}

FockVector deformed_apply(int n, const DeformationParams& params, const FockVector& v,
                          int cutoff) {
  FockVector out = sugawara_apply(n, v, cutoff);
  if (n == 0) {
    fock_add_scaled(out, v, GaussianRational(params.h()));
    return truncate_above(std::move(out), cutoff);
  }
  GaussianRational coeff = params.eta.as_complex();
  coeff += GaussianRational(Rational(0), Rational(n)) * params.kappa.as_complex();
  fock_add_scaled(out, j_apply(n, v), coeff);
  return truncate_above(std::move(out), cutoff);
}

GaussMat deformed_mode_matrix(int n, const DeformationParams& params, int from) {
  return mode_matrix_impl<GaussianRational>(n, from,
                                            [n, &params](const FockVector& v, int cutoff) {
                                              return deformed_apply(n, params, v, cutoff);
                                            });
}

Rational detect_central_charge(const DeformationParams& params) {
  const FockVector omega = fock_unit({});
  const FockVector down = deformed_apply(-2, params, omega, 2);
  const FockVector updown = deformed_apply(2, params, down, 2);
  const FockVector up = deformed_apply(2, params, omega, 2);
  const FockVector downup = deformed_apply(-2, params, up, 2);
  GaussianRational vev = fock_pair(omega, updown);
  vev -= fock_pair(omega, downup);
  const Rational bracket = real_part_checked(vev);
  return Rational(2) * bracket - Rational(8) * params.h();
}

// ---------------------------------------------------------------------------
// Quadratic-sum level matrices
// ---------------------------------------------------------------------------

namespace {

template <typename Scalar, typename Apply>
Mat<Scalar> lk_coords_impl(int level, Apply&& apply) {
  const auto& basis = fock_basis(level);
  const std::size_t dim = basis.size();
  std::map<FockPartition, std::size_t> index;
  for (std::size_t i = 0; i < dim; ++i) index.emplace(basis[i], i);
  Mat<Scalar> out(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    FockVector acc;
    for (int k = 0; k <= level; ++k) {
      const FockVector mid = apply(k, FockVector{{basis[j], GaussianRational(Rational(1))}});
      if (mid.empty()) continue;
      fock_add_scaled(acc, apply(-k, mid), GaussianRational(Rational(1)));
    }
    for (const auto& [part, coeff] : acc) {
      if constexpr (std::is_same_v<Scalar, Rational>)
        out.at(index.at(part), j) = real_part_checked(coeff);
      else
        out.at(index.at(part), j) = coeff;
    }
  }
  return out;
}

std::vector<Rational> basis_norms(const std::vector<FockPartition>& basis) {
  std::vector<Rational> out;
  out.reserve(basis.size());
  for (const auto& part : basis) out.push_back(fock_norm_sq(part));
  return out;
}

}  // namespace

RatMat SugawaraFormLevel::form_matrix() const {
  RatMat out = coords;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) *= norm_sq[i];
  return out;
}

SugawaraFormLevel lk_quadratic_form(int level) {
  SugawaraFormLevel out;
  out.basis = fock_basis(level);
  out.norm_sq = basis_norms(out.basis);
  out.coords = lk_coords_impl<Rational>(
      level, [level](int k, const FockVector& v) { return sugawara_apply(k, v, level); });
  return out;
}

DeformedFormLevel lk_quadratic_form(int level, const DeformationParams& params) {
  DeformedFormLevel out;
  out.basis = fock_basis(level);
  out.norm_sq = basis_norms(out.basis);
  out.coords = lk_coords_impl<GaussianRational>(level, [level, &params](int k, const FockVector& v) {
    return deformed_apply(k, params, v, level);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Sum of all modes as a form
// ---------------------------------------------------------------------------

SumLnForms sum_ln_forms(int window, int cutoff) {
  if (cutoff < window) throw DomainError("sum_ln_forms needs cutoff >= window");
  SumLnForms out;
  for (int level = 0; level <= window; ++level)
    for (const auto& part : fock_basis(level)) {
      out.basis.push_back(part);
      out.level_of.push_back(level);
    }
  const std::size_t dim = out.basis.size();
  out.via_modes = RatMat(dim, dim);
  out.via_currents = RatMat(dim, dim);
  std::vector<FockVector> units;
  std::vector<FockVector> jm;
  std::vector<FockVector> jmjm;
  units.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    units.push_back(FockVector{{out.basis[i], GaussianRational(Rational(1))}});
    jm.push_back(jminus_apply(units[i], cutoff));
    jmjm.push_back(jminus_apply(jm[i], cutoff));
  }
  const Rational half(1, 2);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const int shift = out.level_of[j] - out.level_of[i];
      // Mode route: positive modes act on the left slot, the rest on the
      // right, per the defining split of the form.
      GaussianRational modes;
      if (shift < 0)
        modes = fock_pair(sugawara_apply(-shift, units[i], cutoff), units[j]);
      else
        modes = fock_pair(units[i], sugawara_apply(shift, units[j], cutoff));
      out.via_modes.at(i, j) = real_part_checked(modes);
      // Current route: <b_i, J_+J_+ b_j> = <J_-J_- b_i, b_j> and
      // <b_i, J_+J_- b_j> = <J_- b_i, J_- b_j>.
      GaussianRational currents = half * fock_pair(jmjm[i], units[j]);
      currents += half * fock_pair(units[i], jmjm[j]);
      currents += fock_pair(jm[i], jm[j]);
      out.via_currents.at(i, j) = real_part_checked(currents);
    }
  }
  return out;
}

}  // namespace walg
