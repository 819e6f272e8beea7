#pragma once

#include <map>
#include <vector>

#include "walg/errors.hpp"
#include "walg/exact_mat.hpp"
#include "walg/rational.hpp"

namespace walg {

// ---------------------------------------------------------------------------
// Charge-zero Fock space of the U(1) current
// ---------------------------------------------------------------------------

// Basis vector J_{-n_1}...J_{-n_k} Omega encoded as the weakly decreasing
// partition [n_1 >= ... >= n_k]; the vacuum is the empty partition.  Distinct
// partitions are orthogonal and the squared norm is
// prod(parts) * prod(multiplicities!).
using FockPartition = std::vector<int>;

int fock_level(const FockPartition& p);
Rational fock_norm_sq(const FockPartition& p);

// Partitions of the level in the fixed enumeration order shared with the
// module layer; level 0 is the vacuum alone.
const std::vector<FockPartition>& fock_basis(int level);

// Element of the Fock space with exact complex-rational coordinates on the
// partition basis.
using FockVector = std::map<FockPartition, GaussianRational>;

// Single basis vector with coefficient 1.  Parts may come in any order and
// are sorted; nonpositive parts throw DomainError.
FockVector fock_unit(FockPartition parts);

void fock_add_scaled(FockVector& dst, const FockVector& src, const GaussianRational& scale);

// <a, b> under the sesquilinear pairing, conjugate-linear in the first slot.
GaussianRational fock_pair(const FockVector& a, const FockVector& b);

// Drops all components at levels above cutoff.
FockVector truncate_above(FockVector v, int cutoff);

// Current mode J_n: for n < 0 prepends the part -n, for n > 0 removes one
// copy of the part n with coefficient n * multiplicity (zero when the part is
// absent), and J_0 acts as zero in the charge-zero sector.
FockVector j_apply(int n, const FockVector& v);

// J_- = sum_{n > 0} J_n and J_-' = sum_{k > 0} k J_k; both sums are finite on
// every vector since parts are bounded by the level.
FockVector jminus_apply(const FockVector& v, int cutoff);
FockVector jprime_apply(const FockVector& v, int cutoff);

// ---------------------------------------------------------------------------
// Sugawara Virasoro action, central charge 1
// ---------------------------------------------------------------------------

// L_n = 1/2 (sum_{k > -1} J_{n-k} J_k + sum_{k <= -1} J_k J_{n-k}) evaluated
// as the finite sum of current bilinears that survive on the argument's
// levels; components of the result above cutoff are dropped.
FockVector sugawara_apply(int n, const FockVector& v, int cutoff);

// Matrix of L_n from the level `from` partition basis to the level `from - n`
// basis; either level below 0 gives the correspondingly empty matrix.
RatMat sugawara_mode_matrix(int n, int from);

// ---------------------------------------------------------------------------
// Deformed Virasoro family
// ---------------------------------------------------------------------------

// A real or purely imaginary exact number: value or i * value.  Squaring
// stays rational (of either sign), which is all the deformed coefficients
// need.
struct ExactParameter {
  Rational value{0};
  bool imaginary = false;

  GaussianRational as_complex() const {
    return imaginary ? GaussianRational(Rational(0), value) : GaussianRational(value);
  }
  Rational squared() const { return imaginary ? Rational(-value * value) : Rational(value * value); }
};

struct DeformationParams {
  ExactParameter kappa;
  ExactParameter eta;

  // Lowest eigenvalue shift of the deformed L_0: (kappa^2 + eta^2) / 2.
  Rational h() const;
};

// The deformed modes: L_0 + h for n = 0 and L_n + (eta + i n kappa) J_n for
// n != 0.  The pairing of the parameters with the constant and the
// n-proportional part of the coefficient is forced by requiring the bracket
// relations to close with a central charge independent of eta; see
// detect_central_charge.
FockVector deformed_apply(int n, const DeformationParams& params, const FockVector& v, int cutoff);

GaussMat deformed_mode_matrix(int n, const DeformationParams& params, int from);

// Central charge of the deformed family, read off exactly from
// <Omega, [L'_2, L'_{-2}] Omega> = 4h + c/2.  Comes out as 1 + 12 kappa^2,
// with eta dropping out of the bracket identically.
Rational detect_central_charge(const DeformationParams& params);

// ---------------------------------------------------------------------------
// Level matrices of sum_{k >= 0} L_{-k} L_k
// ---------------------------------------------------------------------------

// Restriction of the quadratic sum to one level: `coords` is the operator
// matrix in the partition basis (A b_j = sum_i coords(i, j) b_i) and
// `norm_sq` the diagonal Gram of that basis.  The eigenvalues of the form
// with respect to the inner product are exactly the eigenvalues of coords;
// the sesquilinear-form matrix diag(norm_sq) * coords is symmetric here.
struct SugawaraFormLevel {
  std::vector<FockPartition> basis;
  std::vector<Rational> norm_sq;
  RatMat coords;

  RatMat form_matrix() const;
};
SugawaraFormLevel lk_quadratic_form(int level);

// Deformed variant sum_{k >= 0} L'_{-k} L'_k.  The matrix is neither real
// nor normal in general, but it is similar to the matrix of the same
// operator in the orthonormalized basis, so its spectrum is the spectrum
// being bounded.
struct DeformedFormLevel {
  std::vector<FockPartition> basis;
  std::vector<Rational> norm_sq;
  GaussMat coords;
};
DeformedFormLevel lk_quadratic_form(int level, const DeformationParams& params);

// ---------------------------------------------------------------------------
// The sum of all Virasoro modes as a sesquilinear form
// ---------------------------------------------------------------------------

// The form <b_i, (sum_n L_n) b_j> over the concatenated bases of levels
// 0..window, computed by two independent routes: mode by mode through the
// Sugawara action (only n = level_j - level_i contributes to an entry, with
// positive modes moved to the left slot), and through the current splitting
// 1/2 (J_+ J_+ + J_- J_-) + J_+ J_-, where J_+ enters as the formal adjoint
// of J_-.  Any cutoff >= window keeps both routes exact on the window.
struct SumLnForms {
  std::vector<FockPartition> basis;
  std::vector<int> level_of;
  RatMat via_modes;
  RatMat via_currents;
};
SumLnForms sum_ln_forms(int window, int cutoff);

}  // namespace walg
