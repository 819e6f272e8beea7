#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "walg/exact_mat.hpp"
#include "walg/lowest_weight.hpp"

namespace walg {

// Default uniform-grid resolution (2^12) shared by quadrature, the flow
// solver and coefficient extraction.
inline constexpr std::size_t default_grid_size = 4096;

// ---------------------------------------------------------------------------
// Test functions on the circle
// ---------------------------------------------------------------------------

// A function on S^1 held through its trigonometric coefficients
// f(e^{i theta}) = sum_{|n| <= D} fhat_n e^{i n theta}.  Coefficients are
// stored as exact Gaussian rationals in every case; floats embed exactly as
// dyadic rationals, so sums, products and derivatives never lose precision.
// The `exact` flag records provenance only: true for symbolically built
// functions (basis exponentials, rational constants and their arithmetic),
// false for functions whose coefficients came out of a grid transform.
//
// A function is real iff fhat_{-n} = conj(fhat_n) for all n; grid-extracted
// coefficient sets within 1e-12 of that symmetry are symmetrized so the
// invariant holds exactly.  An optional uniform grid of samples can be
// attached; it always agrees with the trigonometric evaluation to 1e-12.
class TestFunction {
 public:
  TestFunction() = default;  // the zero function

  static TestFunction constant(const Rational& a);
  static TestFunction constant(const GaussianRational& a);
  // e_k(theta) = exp(i k theta).
  static TestFunction exponential(int k);
  static TestFunction cosine(int k);
  static TestFunction sine(int k);
  static TestFunction from_coefficients(const std::map<int, GaussianRational>& coeffs,
                                        bool exact = true);
  // Coefficient extraction from uniform samples over [0, 2pi); the size must
  // be a power of two.  All bins below the Nyquist frequency are kept (small
  // ones pruned under a mass budget), so re-evaluating the extracted
  // polynomial on the same grid reproduces the samples; a violation beyond
  // 1e-12 (relative) raises AccuracyError.
  static TestFunction from_grid(const std::vector<std::complex<double>>& samples);
  static TestFunction from_grid(const std::vector<double>& samples);

  int degree() const;  // max |n| with fhat_n != 0; 0 for the zero function
  GaussianRational coefficient(int n) const;
  std::complex<double> coefficient_complex(int n) const;
  const std::map<int, GaussianRational>& coefficients() const { return coeffs_; }
  bool is_exact() const { return exact_; }
  bool is_real() const { return real_; }

  bool has_grid() const { return !grid_.empty(); }
  const std::vector<std::complex<double>>& grid() const;
  void attach_grid(std::size_t size = default_grid_size);

  TestFunction operator+(const TestFunction& o) const;
  TestFunction operator-(const TestFunction& o) const;
  TestFunction operator*(const TestFunction& o) const;  // exact convolution
  TestFunction scaled(const GaussianRational& s) const;
  // f' := (1/i) d/dtheta, i.e. fhat_n -> n * fhat_n.  This is the derivative
  // convention used throughout the smeared-commutator identities.
  TestFunction derivative() const;

  std::complex<double> evaluate(double theta) const;
  std::vector<std::complex<double>> samples(std::size_t size) const;
  std::vector<double> real_samples(std::size_t size) const;  // DomainError unless real
  double min_real_sample(std::size_t size = default_grid_size) const;
  bool is_strictly_positive(std::size_t size = default_grid_size) const;

 private:
  void normalize();

  std::map<int, GaussianRational> coeffs_;
  bool exact_ = true;
  bool real_ = true;
  std::vector<std::complex<double>> grid_;
  // Float image of coeffs_, built once at construction for fast evaluation.
  std::vector<std::pair<int, std::complex<double>>> float_modes_;
};

// ---------------------------------------------------------------------------
// Circle diffeomorphisms
// ---------------------------------------------------------------------------

// An orientation-preserving diffeomorphism of S^1, stored through its lift:
// sigma(2 pi j / M) for j = 0..M-1, with sigma(theta + 2 pi) = sigma(theta)
// + 2 pi and sigma strictly increasing.  Off-grid values, derivatives and
// the inverse all come from trigonometric interpolation of the periodic part
// sigma(theta) - theta (bins below 1e-14 of the peak are pruned, which keeps
// high-order spectral derivatives of smooth lifts clean).
class CircleDiffeo {
 public:
  // Validates: power-of-two size >= 8, strict monotonicity including the
  // wrap-around step.  sigma(0) is kept as given (rotations keep their
  // offset).
  explicit CircleDiffeo(std::vector<double> lift);

  static CircleDiffeo identity(std::size_t size = default_grid_size);
  static CircleDiffeo rotation(double alpha, std::size_t size = default_grid_size);
  // The fractional-linear circle map z -> e^{i alpha} (z - w)/(1 - conj(w) z)
  // for |w| < 1, sampled on the grid and unwrapped to a monotone lift.
  static CircleDiffeo mobius(std::complex<double> w, double alpha = 0.0,
                             std::size_t size = default_grid_size);

  std::size_t grid_size() const { return lift_.size(); }
  const std::vector<double>& lift() const { return lift_; }

  double sigma(double theta) const;
  double sigma_prime(double theta) const;
  // Unique theta with sigma(theta) = target (monotone inverse; Newton with a
  // bisection safeguard on the interpolant).
  double inverse_sigma(double target) const;

  // Spectral derivatives of the lift on its own grid.
  std::vector<double> derivative_samples() const;
  std::vector<double> second_derivative_samples() const;
  std::vector<double> third_derivative_samples() const;

  // (this o inner): theta -> sigma_this(sigma_inner(theta)), on inner's grid.
  CircleDiffeo composed_with(const CircleDiffeo& inner) const;

 private:
  std::vector<double> lift_;
  // Pruned spectrum of the periodic part, (frequency, coefficient).
  std::vector<std::pair<int, std::complex<double>>> modes_;

  std::vector<double> derivative_order(int order) const;
};

// ---------------------------------------------------------------------------
// Flows of positive vector fields
// ---------------------------------------------------------------------------

// N_g = (1/2pi) * integral dtheta / g: the normalization that makes the flow
// of the field g close up in time 2 pi.  Uniform-grid quadrature (spectrally
// accurate for smooth g); relative error below 1e-10 for trigonometric g of
// degree <= 16 at 2^12 samples.  DomainError unless g is real and strictly
// positive on the grid.
double ng_constant(const TestFunction& g, std::size_t samples = default_grid_size);

// Solves sigma'(s) = N_g * g(e^{i sigma(s)}), sigma(0) = 0, by fixed-step
// RK4 over [0, 2pi] with the given power-of-two step count, and returns the
// diffeomorphism gamma(e^{i s}) = e^{i sigma(s)}.  The raw endpoint must
// satisfy |sigma(2pi) - 2pi| <= 1e-8 (AccuracyError with the achieved
// residual otherwise); the lift is then closed by subtracting the linear
// drift, a perturbation below that same residual, so the periodic part is
// exactly periodic.  Finally the flow residual of the result must be at most
// 1e-6, again AccuracyError with the achieved value otherwise.
CircleDiffeo exp_vector_field(const TestFunction& g, std::size_t steps = default_grid_size);

// sup_j |sigma'(theta_j) - N_g * g(e^{i sigma(theta_j)})| over gamma's grid,
// with sigma' from spectral differentiation.  Because sigma is a bijection
// of the circle, this equals the grid sup of |dgamma o gamma^{-1} - N_g g|.
double flow_residual(const CircleDiffeo& gamma, const TestFunction& g);

// ---------------------------------------------------------------------------
// Covariance action and the Schwarzian cocycle
// ---------------------------------------------------------------------------

// The change-of-variables action on a density of weight d:
//   f  ->  (dgamma o gamma^{-1})^{d-1} * (f o gamma^{-1}),
// where dgamma(e^{i theta}) = sigma'(theta), sampled on gamma's grid and
// returned with extracted coefficients and the grid attached.  d >= 1.
TestFunction covariance_transform(const CircleDiffeo& gamma, const TestFunction& f, int d);

// Angular Schwarzian density of gamma on its grid:
//   s(theta) = {sigma, theta}(theta) + (sigma'(theta)^2 - 1) / 2,
// where {sigma, theta} = sigma'''/sigma' - (3/2)(sigma''/sigma')^2.  This is
// the density that vanishes identically for fractional-linear maps (and for
// rotations), and it is the integrand of the cocycle constant below.
std::vector<double> schwarzian_density(const CircleDiffeo& gamma);

// The covariance constant of the stress energy:
//   r = -(c/24) * (1/2pi) * integral s(theta) f(e^{i theta}) dtheta,
// with s the angular Schwarzian density above.  The measure is fixed to
// dtheta/2pi; with that choice r is dimensionless in the cutoff and the
// fractional-linear case gives exactly 0, which is the convention-free part.
// Returns the real part of the quadrature (imaginary part is roundoff for
// real f).
double schwarzian_cocycle(const CircleDiffeo& gamma, const TestFunction& f, double c);

// ---------------------------------------------------------------------------
// Smearing against mode operators
// ---------------------------------------------------------------------------

// The matrix of phi(f) = sum_n fhat_n phi_n on the direct sum of the level
// quotients 0..cutoff, in the per-level quotient bases stacked in level
// order.  Entries are exact Gaussian rationals (coefficients are dyadic
// exact even for grid-extracted f); `exact` carries f's provenance flag.
struct SmearedOperator {
  int cutoff = -1;
  // offsets[n] is the first stacked index of level n; offsets[cutoff + 1] is
  // the total dimension.
  std::vector<std::size_t> offsets;
  GaussMat matrix;
  bool exact = true;

  std::size_t dim() const { return offsets.empty() ? 0 : offsets.back(); }
};

// Assembles phi(f) truncated to levels <= cutoff for the mode family of
// `field`.  Modes whose source or target level falls outside the truncation
// contribute nothing; a cutoff beyond the built range raises RangeError.
SmearedOperator smear_truncated(GradedModule& mod, const FieldSpec& field,
                                const TestFunction& f, int cutoff);

// Float image of an exact complex matrix.
std::vector<std::vector<std::complex<double>>> to_complex(const GaussMat& m);

// ---------------------------------------------------------------------------
// Window-exact commutator checks
// ---------------------------------------------------------------------------

// Result of comparing [phi(f), T(g)] against the smeared bracket field on
// the window of levels <= cutoff - deg f - deg g.  On that window the
// truncated products equal the untruncated ones, so for exact inputs the
// comparison is exact.
struct WindowCheckReport {
  int cutoff = 0;
  int window = -1;
  std::size_t window_dim = 0;
  bool inputs_exact = false;
  // The window difference vanished identically (exact-input path).
  bool exact_match = false;
  double max_abs_difference = 0.0;
  double max_abs_commutator = 0.0;
  double tolerance = 1e-9;
  bool pass = false;
  // Window blocks of the two sides, for callers that want the matrices.
  GaussMat commutator;
  GaussMat expected;
};

// Checks the smeared commutator identity
//   [phi(f), T(g)] = phi(f' g - (d-1) f g')        (f' := (1/i) d/dtheta)
// on the window, where d is the conformal dimension of the field.  The sign
// of the right-hand side is calibrated once by the mode identity
// [L_{-1}, W_1] = -3 W_0 and frozen; the convention-free consequence is
// [phi(g^{d-1}), T(g)] = 0 for any g whose (d-1)-th power smears the field.
// When the field is the stress energy itself, the central contribution
// (c/12) sum_m m (m^2 - 1) fhat_m ghat_{-m} times the identity is added to
// the right-hand side.  An empty window raises RangeError.
WindowCheckReport commutator_window_check(GradedModule& mod, const TestFunction& f,
                                          const TestFunction& g, const FieldSpec& field,
                                          int cutoff, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Truncated stress-energy spectra
// ---------------------------------------------------------------------------

// Minimum eigenvalue of the compression of T(g) to levels <= N, for each N
// in `cutoffs`.  The compression is taken in the module inner product (exact
// Gram LDL reduction, float eigensolve), so the sequence is non-increasing
// along nested cutoffs by the variational principle.  No convergence to the
// full-space bound is claimed; the values are reported as data.  g must be
// real (DomainError); complex-Hermitian compressions (g with nonzero sine
// parts) are handled through their real doubling.
std::vector<double> t_min_spectrum_sequence(GradedModule& mod, const TestFunction& g,
                                            const std::vector<int>& cutoffs);

// ---------------------------------------------------------------------------
// Local-bound probe
// ---------------------------------------------------------------------------

// One probe vector, given in the quotient basis of its level.
struct ProbeSample {
  std::string label;
  int level = 0;
  std::vector<double> coords;
};

struct ProbeRow {
  std::string label;
  int level = 0;
  double numerator = 0.0;    // || W(g^2) Psi ||
  double denominator = 0.0;  // || (T(g) + r_hat)^2 Psi ||
  double ratio = 0.0;
  bool skipped = false;
};

// Diagnostic ratio table || W(g^2) Psi || / || (T(g) + r_hat)^2 Psi || on a
// truncation of the spin-3 vacuum module, with r_hat the minimum of the
// truncated T(g) spectrum at this cutoff (a lower-bound estimate of the true
// additive constant, not a certified value).  Truncation error of the
// operator powers is uncontrolled, so the table carries no pass/fail
// verdict.  Samples must sit at level <= cutoff/2; denominators below 1e-12
// mark the row skipped and add a note.  g must be real and nonnegative on
// the grid; the module must be a spin-3 vacuum module.
struct ProbeReport {
  int cutoff = 0;
  double r_hat = 0.0;
  std::vector<ProbeRow> rows;
  std::vector<std::string> notes;
};

ProbeReport local_bound_probe(GradedModule& mod, const TestFunction& g,
                              const std::vector<ProbeSample>& samples, int cutoff);

}  // namespace walg
