#include "walg/circle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>

#include "walg/bounds.hpp"
#include "walg/errors.hpp"

namespace walg {

namespace {

using cplx = std::complex<double>;

constexpr double two_pi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// ---------------------------------------------------------------------------
// Radix-2 FFT
// ---------------------------------------------------------------------------

// In-place iterative radix-2 transform.  sign = -1 computes the forward sums
// a_k = sum_j x_j e^{-2 pi i j k / M}, sign = +1 the unnormalized inverse.
// Twiddles come from a per-stage table built with std::polar, which keeps the
// transform accurate to a few ulps (the spectral-derivative chain amplifies
// coefficient noise by powers of the frequency, so this matters).
void fft_radix2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<cplx> tw;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    tw.resize(half);
    for (std::size_t j = 0; j < half; ++j)
      tw[j] = std::polar(1.0, sign * two_pi * double(j) / double(len));
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const cplx u = a[i + j];
        const cplx v = a[i + j + half] * tw[j];
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }
}

// Normalized forward coefficients of a sample vector: position k holds
// (1/M) sum_j x_j e^{-2 pi i j k / M}.
std::vector<cplx> forward_coefficients(std::vector<cplx> samples) {
  fft_radix2(samples, -1);
  const double inv = 1.0 / double(samples.size());
  for (auto& v : samples) v *= inv;
  return samples;
}

// Frequency of spectrum position k on a size-M grid, in (-M/2, M/2]; the
// Nyquist position maps to +M/2 and is split by the callers.
int bin_frequency(std::size_t k, std::size_t m) {
  return k <= m / 2 ? int(k) : int(k) - int(m);
}

double magnitude(const cplx& z) { return std::abs(z); }

double magnitude(const GaussianRational& z) {
  return std::hypot(to_double(z.re), to_double(z.im));
}

cplx to_cplx(const GaussianRational& z) { return {to_double(z.re), to_double(z.im)}; }

// Exact rational image of a double; the mantissa embeds exactly.
GaussianRational exact_from(const cplx& z) {
  return {Rational(z.real()), Rational(z.imag())};
}

// ---------------------------------------------------------------------------
// Shared exact helpers
// ---------------------------------------------------------------------------

RatMat quotient_gram(GradedModule& mod, int level) {
  const QuotientData& q = mod.radical_quotient(level);
  const RatMat& full = mod.gram_matrix(level);
  RatMat out(q.rank, q.rank);
  for (std::size_t i = 0; i < q.rank; ++i)
    for (std::size_t j = 0; j < q.rank; ++j)
      out.at(i, j) = full.at(q.selected[i], q.selected[j]);
  return out;
}

GaussMat take_cols(const GaussMat& m, std::size_t w) {
  GaussMat out(m.rows(), w);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < w; ++j) out.at(i, j) = m.at(i, j);
  return out;
}

GaussMat take_rows(const GaussMat& m, std::size_t w) {
  GaussMat out(w, m.cols());
  for (std::size_t i = 0; i < w; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out.at(i, j) = m.at(i, j);
  return out;
}

GaussMat take_block(const GaussMat& m, std::size_t w) { return take_rows(take_cols(m, w), w); }

double max_magnitude(const GaussMat& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      worst = std::max(worst, magnitude(m.at(i, j)));
  return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

void TestFunction::normalize() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();)
    it = it->second.is_zero() ? coeffs_.erase(it) : std::next(it);
  real_ = true;
  for (const auto& [n, value] : coeffs_) {
    const auto mirror = coeffs_.find(-n);
    if (mirror == coeffs_.end() || !(mirror->second == value.conj())) {
      real_ = false;
      break;
    }
  }
  float_modes_.clear();
  float_modes_.reserve(coeffs_.size());
  for (const auto& [n, value] : coeffs_) float_modes_.emplace_back(n, to_cplx(value));
}

TestFunction TestFunction::constant(const Rational& a) {
  return constant(GaussianRational(a));
}

TestFunction TestFunction::constant(const GaussianRational& a) {
  return from_coefficients({{0, a}}, true);
}

TestFunction TestFunction::exponential(int k) {
  return from_coefficients({{k, GaussianRational(Rational(1))}}, true);
}

TestFunction TestFunction::cosine(int k) {
  std::map<int, GaussianRational> coeffs;
  const GaussianRational half{rat(1, 2)};
  coeffs[k] += half;
  coeffs[-k] += half;
  return from_coefficients(coeffs, true);
}

TestFunction TestFunction::sine(int k) {
  std::map<int, GaussianRational> coeffs;
  coeffs[k] += GaussianRational(Rational(0), rat(-1, 2));
  coeffs[-k] += GaussianRational(Rational(0), rat(1, 2));
  return from_coefficients(coeffs, true);
}

TestFunction TestFunction::from_coefficients(const std::map<int, GaussianRational>& coeffs,
                                             bool exact) {
  TestFunction f;
  f.coeffs_ = coeffs;
  f.exact_ = exact;
  f.normalize();
  return f;
}

TestFunction TestFunction::from_grid(const std::vector<cplx>& samples) {
  const std::size_t m = samples.size();
  if (!is_pow2(m)) throw DomainError("from_grid: sample count must be a power of two");
  const std::vector<cplx> spec = forward_coefficients(samples);

  double peak = 0.0;
  for (const auto& v : spec) peak = std::max(peak, magnitude(v));

  // Prune bins below 1e-15 of the peak when their combined mass stays inside
  // the 1e-12 grid-agreement budget; otherwise keep everything.
  const double threshold = 1e-15 * peak;
  double small_mass = 0.0;
  for (const auto& v : spec)
    if (magnitude(v) <= threshold) small_mass += magnitude(v);
  const bool prune = small_mass <= 2.5e-13 * std::max(1.0, peak);

  TestFunction f;
  f.exact_ = false;
  for (std::size_t k = 0; k < m; ++k) {
    if (prune && magnitude(spec[k]) <= threshold) continue;
    if (spec[k] == cplx(0.0, 0.0)) continue;
    const int n = bin_frequency(k, m);
    if (std::size_t(std::abs(n)) == m / 2) {
      // Split the Nyquist bin symmetrically; on the grid the two halves add
      // back to the original alternating mode exactly.
      const cplx halfval = spec[k] * 0.5;
      f.coeffs_[int(m) / 2] += exact_from(halfval);
      f.coeffs_[-int(m) / 2] += exact_from(halfval);
    } else {
      f.coeffs_[n] += exact_from(spec[k]);
    }
  }
  f.normalize();

  // Symmetrize near-real coefficient sets so the reality invariant is exact.
  if (!f.real_) {
    double asym = 0.0;
    for (const auto& [n, value] : f.coeffs_) {
      const cplx a = to_cplx(value);
      const cplx b = std::conj(to_cplx(f.coefficient(-n)));
      asym = std::max(asym, magnitude(a - b));
    }
    if (asym <= 1e-12 * std::max(1.0, peak)) {
      std::map<int, GaussianRational> sym;
      const Rational half = rat(1, 2);
      for (const auto& [n, value] : f.coeffs_) {
        sym[n] = half * (value + f.coefficient(-n).conj());
      }
      f.coeffs_ = std::move(sym);
      f.normalize();
      f.real_ = true;
    }
  }

  // Grid agreement: re-evaluating the kept polynomial on the same grid must
  // reproduce the input samples.
  f.grid_ = samples;
  const std::vector<cplx> recon = f.samples(m);
  double scale = 1.0;
  for (const auto& v : samples) scale = std::max(scale, magnitude(v));
  double err = 0.0;
  for (std::size_t j = 0; j < m; ++j) err = std::max(err, magnitude(recon[j] - samples[j]));
  if (err > 1e-12 * scale)
    throw AccuracyError("from_grid: samples disagree with their trigonometric extraction",
                        err / scale);
  return f;
}

TestFunction TestFunction::from_grid(const std::vector<double>& samples) {
  std::vector<cplx> lifted(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) lifted[j] = cplx(samples[j], 0.0);
  return from_grid(lifted);
}

int TestFunction::degree() const {
  int d = 0;
  for (const auto& [n, value] : coeffs_) {
    (void)value;
    d = std::max(d, std::abs(n));
  }
  return d;
}

GaussianRational TestFunction::coefficient(int n) const {
  const auto it = coeffs_.find(n);
  return it == coeffs_.end() ? GaussianRational() : it->second;
}

cplx TestFunction::coefficient_complex(int n) const { return to_cplx(coefficient(n)); }

const std::vector<cplx>& TestFunction::grid() const {
  if (grid_.empty()) throw DomainError("test function has no grid attached");
  return grid_;
}

void TestFunction::attach_grid(std::size_t size) { grid_ = samples(size); }

TestFunction TestFunction::operator+(const TestFunction& o) const {
  std::map<int, GaussianRational> sum = coeffs_;
  for (const auto& [n, value] : o.coeffs_) sum[n] += value;
  return from_coefficients(sum, exact_ && o.exact_);
}

TestFunction TestFunction::operator-(const TestFunction& o) const {
  std::map<int, GaussianRational> diff = coeffs_;
  for (const auto& [n, value] : o.coeffs_) diff[n] -= value;
  return from_coefficients(diff, exact_ && o.exact_);
}

TestFunction TestFunction::operator*(const TestFunction& o) const {
  std::map<int, GaussianRational> prod;
  for (const auto& [n, a] : coeffs_)
    for (const auto& [m, b] : o.coeffs_) prod[n + m] += a * b;
  return from_coefficients(prod, exact_ && o.exact_);
}

TestFunction TestFunction::scaled(const GaussianRational& s) const {
  std::map<int, GaussianRational> out = coeffs_;
  for (auto& [n, value] : out) {
    (void)n;
    value *= s;
  }
  return from_coefficients(out, exact_);
}

TestFunction TestFunction::derivative() const {
  std::map<int, GaussianRational> out;
  for (const auto& [n, value] : coeffs_) out[n] = Rational(n) * value;
  return from_coefficients(out, exact_);
}

cplx TestFunction::evaluate(double theta) const {
  cplx acc(0.0, 0.0);
  for (const auto& [n, value] : float_modes_) acc += value * std::polar(1.0, n * theta);
  return acc;
}

std::vector<cplx> TestFunction::samples(std::size_t size) const {
  if (size == 0) throw DomainError("samples: size must be positive");
  if (is_pow2(size) && std::size_t(degree()) <= size / 2) {
    // Spectral placement + inverse transform; exact counterpart of the
    // extraction in from_grid, so roundtrips close on the grid.
    std::vector<cplx> spec(size, cplx(0.0, 0.0));
    for (const auto& [n, value] : float_modes_) {
      const std::size_t k = n >= 0 ? std::size_t(n) : size - std::size_t(-n);
      spec[k % size] += value;
    }
    fft_radix2(spec, +1);
    return spec;
  }
  std::vector<cplx> out(size);
  for (std::size_t j = 0; j < size; ++j) out[j] = evaluate(two_pi * double(j) / double(size));
  return out;
}

std::vector<double> TestFunction::real_samples(std::size_t size) const {
  if (!real_) throw DomainError("real_samples: function is not real");
  const std::vector<cplx> vals = samples(size);
  std::vector<double> out(vals.size());
  for (std::size_t j = 0; j < vals.size(); ++j) out[j] = vals[j].real();
  return out;
}

double TestFunction::min_real_sample(std::size_t size) const {
  const std::vector<double> vals = real_samples(size);
  return *std::min_element(vals.begin(), vals.end());
}

bool TestFunction::is_strictly_positive(std::size_t size) const {
  return real_ && min_real_sample(size) > 0.0;
}

// ---------------------------------------------------------------------------
// CircleDiffeo
// ---------------------------------------------------------------------------

CircleDiffeo::CircleDiffeo(std::vector<double> lift) : lift_(std::move(lift)) {
  const std::size_t m = lift_.size();
  if (!is_pow2(m) || m < 8)
    throw DomainError("diffeomorphism grid size must be a power of two, at least 8");
  for (std::size_t j = 0; j + 1 < m; ++j)
    if (!(lift_[j + 1] > lift_[j])) throw DomainError("lift is not strictly increasing");
  if (!(lift_[0] + two_pi > lift_[m - 1]))
    throw DomainError("lift is not strictly increasing across the period");

  // Spectrum of the periodic part sigma(theta) - theta, pruned at 1e-14 of
  // the peak so spectral derivatives of smooth lifts stay clean.
  std::vector<cplx> period(m);
  for (std::size_t j = 0; j < m; ++j)
    period[j] = cplx(lift_[j] - two_pi * double(j) / double(m), 0.0);
  const std::vector<cplx> spec = forward_coefficients(period);
  double peak = 0.0;
  for (const auto& v : spec) peak = std::max(peak, magnitude(v));
  const double threshold = 1e-14 * peak;
  for (std::size_t k = 0; k < m; ++k) {
    const int n = bin_frequency(k, m);
    if (n != 0 && magnitude(spec[k]) <= threshold) continue;
    if (std::size_t(std::abs(n)) == m / 2) {
      modes_.emplace_back(-int(m) / 2, spec[k] * 0.5);
      modes_.emplace_back(int(m) / 2, spec[k] * 0.5);
    } else {
      modes_.emplace_back(n, spec[k]);
    }
  }
  std::sort(modes_.begin(), modes_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

CircleDiffeo CircleDiffeo::identity(std::size_t size) {
  std::vector<double> lift(size);
  for (std::size_t j = 0; j < size; ++j) lift[j] = two_pi * double(j) / double(size);
  return CircleDiffeo(std::move(lift));
}

CircleDiffeo CircleDiffeo::rotation(double alpha, std::size_t size) {
  std::vector<double> lift(size);
  for (std::size_t j = 0; j < size; ++j) lift[j] = two_pi * double(j) / double(size) + alpha;
  return CircleDiffeo(std::move(lift));
}

CircleDiffeo CircleDiffeo::mobius(cplx w, double alpha, std::size_t size) {
  if (!(std::abs(w) < 1.0 - 1e-9))
    throw DomainError("mobius: parameter must lie strictly inside the unit disc");
  std::vector<double> lift(size);
  double prev = 0.0;
  for (std::size_t j = 0; j < size; ++j) {
    const cplx z = std::polar(1.0, two_pi * double(j) / double(size));
    const cplx image = std::polar(1.0, alpha) * (z - w) / (1.0 - std::conj(w) * z);
    const double angle = std::arg(image);
    if (j == 0) {
      lift[0] = angle;
    } else {
      double step = angle - prev;
      step -= two_pi * std::round(step / two_pi);
      lift[j] = lift[j - 1] + step;
    }
    prev = angle;
  }
  return CircleDiffeo(std::move(lift));
}

double CircleDiffeo::sigma(double theta) const {
  double acc = theta;
  for (const auto& [n, value] : modes_) acc += (value * std::polar(1.0, n * theta)).real();
  return acc;
}

double CircleDiffeo::sigma_prime(double theta) const {
  double acc = 1.0;
  for (const auto& [n, value] : modes_)
    acc += (cplx(0.0, double(n)) * value * std::polar(1.0, n * theta)).real();
  return acc;
}

std::vector<double> CircleDiffeo::derivative_order(int order) const {
  const std::size_t m = lift_.size();
  std::vector<cplx> spec(m, cplx(0.0, 0.0));
  for (const auto& [n, value] : modes_) {
    if (n == 0) continue;
    cplx factor(1.0, 0.0);
    for (int r = 0; r < order; ++r) factor *= cplx(0.0, double(n));
    const std::size_t k = n > 0 ? std::size_t(n) : m - std::size_t(-n);
    spec[k % m] += factor * value;
  }
  fft_radix2(spec, +1);
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = spec[j].real();
  if (order == 1)
    for (auto& v : out) v += 1.0;
  return out;
}

std::vector<double> CircleDiffeo::derivative_samples() const { return derivative_order(1); }

std::vector<double> CircleDiffeo::second_derivative_samples() const {
  return derivative_order(2);
}

std::vector<double> CircleDiffeo::third_derivative_samples() const {
  return derivative_order(3);
}

double CircleDiffeo::inverse_sigma(double target) const {
  const std::size_t m = lift_.size();
  const double shift = std::floor((target - lift_[0]) / two_pi);
  const double reduced = target - two_pi * shift;  // in [lift0, lift0 + 2 pi)

  // Grid bracket for the reduced target.
  std::size_t lo_idx = std::size_t(
      std::upper_bound(lift_.begin(), lift_.end(), reduced) - lift_.begin());
  double lo, hi, f_lo, f_hi;
  if (lo_idx == 0) {
    // reduced == lift_[0] up to rounding
    lo = -two_pi / double(m);
    hi = 0.0;
    f_lo = sigma(lo);
    f_hi = lift_[0];
  } else {
    lo = two_pi * double(lo_idx - 1) / double(m);
    f_lo = lift_[lo_idx - 1];
    if (lo_idx < m) {
      hi = two_pi * double(lo_idx) / double(m);
      f_hi = lift_[lo_idx];
    } else {
      hi = two_pi;
      f_hi = lift_[0] + two_pi;
    }
  }

  double x = hi > lo && f_hi > f_lo
                 ? lo + (hi - lo) * (reduced - f_lo) / (f_hi - f_lo)
                 : 0.5 * (lo + hi);
  const double tol = 1e-13 * (1.0 + std::abs(reduced));
  for (int iter = 0; iter < 80; ++iter) {
    const double fx = sigma(x) - reduced;
    if (std::abs(fx) <= tol) break;
    if (fx > 0)
      hi = x;
    else
      lo = x;
    const double dfx = sigma_prime(x);
    double next = dfx > 1e-12 ? x - fx / dfx : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x + two_pi * shift;
}

CircleDiffeo CircleDiffeo::composed_with(const CircleDiffeo& inner) const {
  std::vector<double> lift(inner.grid_size());
  for (std::size_t j = 0; j < lift.size(); ++j) lift[j] = sigma(inner.lift()[j]);
  return CircleDiffeo(std::move(lift));
}

// ---------------------------------------------------------------------------
// Flows
// ---------------------------------------------------------------------------

double ng_constant(const TestFunction& g, std::size_t samples) {
  if (!g.is_real()) throw DomainError("ng_constant: requires a real function");
  if (samples == 0) throw DomainError("ng_constant: sample count must be positive");
  const std::vector<double> vals = g.real_samples(samples);
  double acc = 0.0;
  for (const double v : vals) {
    if (!(v > 0.0)) throw DomainError("ng_constant: function is not strictly positive");
    acc += 1.0 / v;
  }
  return acc / double(vals.size());
}

CircleDiffeo exp_vector_field(const TestFunction& g, std::size_t steps) {
  if (!is_pow2(steps) || steps < 8)
    throw DomainError("exp_vector_field: step count must be a power of two, at least 8");
  const std::size_t quad = std::max<std::size_t>(default_grid_size, steps);
  const double n_g = ng_constant(g, quad);

  const auto field = [&](double s) { return n_g * g.evaluate(s).real(); };
  std::vector<double> lift(steps);
  const double h = two_pi / double(steps);
  double s = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    lift[j] = s;
    const double k1 = field(s);
    const double k2 = field(s + 0.5 * h * k1);
    const double k3 = field(s + 0.5 * h * k2);
    const double k4 = field(s + h * k3);
    s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  const double drift = s - two_pi;
  if (!(std::abs(drift) <= 1e-8))
    throw AccuracyError("exp_vector_field: flow endpoint misses periodicity",
                        std::abs(drift));
  // Close the lift exactly so the periodic part carries no sawtooth; the
  // pointwise perturbation is below the endpoint residual just checked.
  for (std::size_t j = 0; j < steps; ++j) lift[j] -= drift * double(j) / double(steps);

  CircleDiffeo gamma(std::move(lift));
  const double residual = flow_residual(gamma, g);
  if (!(residual <= 1e-6))
    throw AccuracyError("exp_vector_field: flow residual above tolerance", residual);
  return gamma;
}

double flow_residual(const CircleDiffeo& gamma, const TestFunction& g) {
  const std::size_t m = gamma.grid_size();
  const double n_g = ng_constant(g, std::max<std::size_t>(default_grid_size, m));
  const std::vector<double> prime = gamma.derivative_samples();
  double worst = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double target = n_g * g.evaluate(gamma.lift()[j]).real();
    worst = std::max(worst, std::abs(prime[j] - target));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Covariance action and cocycle
// ---------------------------------------------------------------------------

TestFunction covariance_transform(const CircleDiffeo& gamma, const TestFunction& f, int d) {
  if (d < 1) throw DomainError("covariance_transform: weight must be a positive integer");
  const std::size_t m = gamma.grid_size();
  std::vector<cplx> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double theta = two_pi * double(j) / double(m);
    const double x = gamma.inverse_sigma(theta);
    const double prime = gamma.sigma_prime(x);
    if (!(prime > 0.0))
      throw DomainError("covariance_transform: lift is not a diffeomorphism at grid resolution");
    out[j] = std::pow(prime, d - 1) * f.evaluate(x);
  }
  return TestFunction::from_grid(out);
}

std::vector<double> schwarzian_density(const CircleDiffeo& gamma) {
  const std::vector<double> d1 = gamma.derivative_samples();
  const std::vector<double> d2 = gamma.second_derivative_samples();
  const std::vector<double> d3 = gamma.third_derivative_samples();
  std::vector<double> out(d1.size());
  for (std::size_t j = 0; j < d1.size(); ++j) {
    if (!(d1[j] > 0.0))
      throw DomainError("schwarzian_density: lift is not a diffeomorphism at grid resolution");
    const double ratio = d2[j] / d1[j];
    out[j] = d3[j] / d1[j] - 1.5 * ratio * ratio + 0.5 * (d1[j] * d1[j] - 1.0);
  }
  return out;
}

double schwarzian_cocycle(const CircleDiffeo& gamma, const TestFunction& f, double c) {
  const std::vector<double> density = schwarzian_density(gamma);
  const std::vector<cplx> vals = f.samples(gamma.grid_size());
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < vals.size(); ++j) acc += density[j] * vals[j];
  acc /= double(vals.size());
  return -(c / 24.0) * acc.real();
}

// ---------------------------------------------------------------------------
// Smearing
// ---------------------------------------------------------------------------

SmearedOperator smear_truncated(GradedModule& mod, const FieldSpec& field,
                                const TestFunction& f, int cutoff) {
  if (cutoff < 0) throw DomainError("smear_truncated: cutoff must be nonnegative");
  if (mod.max_built() < cutoff) {
    std::ostringstream msg;
    msg << "smear_truncated: module built to level " << mod.max_built()
        << ", cutoff " << cutoff << " requested";
    throw RangeError(msg.str());
  }

  SmearedOperator op;
  op.cutoff = cutoff;
  op.exact = f.is_exact();
  op.offsets.assign(std::size_t(cutoff) + 2, 0);
  for (int n = 0; n <= cutoff; ++n)
    op.offsets[std::size_t(n) + 1] = op.offsets[std::size_t(n)] + mod.quotient_rank(n);
  op.matrix = GaussMat(op.dim(), op.dim());

  for (int n = -cutoff; n <= cutoff; ++n) {
    const GaussianRational coeff = f.coefficient(n);
    if (coeff.is_zero()) continue;
    for (int from = 0; from <= cutoff; ++from) {
      const int to = from - n;
      if (to < 0 || to > cutoff) continue;
      const RatMat block = mod.mode_matrix(GeneratorSymbol{field.family, n}, from);
      const std::size_t row0 = op.offsets[std::size_t(to)];
      const std::size_t col0 = op.offsets[std::size_t(from)];
      for (std::size_t i = 0; i < block.rows(); ++i)
        for (std::size_t j = 0; j < block.cols(); ++j) {
          if (block.at(i, j) == 0) continue;
          op.matrix.at(row0 + i, col0 + j) += block.at(i, j) * coeff;
        }
    }
  }
  return op;
}

std::vector<std::vector<cplx>> to_complex(const GaussMat& m) {
  std::vector<std::vector<cplx>> out(m.rows(), std::vector<cplx>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = to_cplx(m.at(i, j));
  return out;
}

// ---------------------------------------------------------------------------
// Window commutator check
// ---------------------------------------------------------------------------

WindowCheckReport commutator_window_check(GradedModule& mod, const TestFunction& f,
                                          const TestFunction& g, const FieldSpec& field,
                                          int cutoff, double tol) {
  WindowCheckReport report;
  report.cutoff = cutoff;
  report.window = cutoff - f.degree() - g.degree();
  report.tolerance = tol;
  report.inputs_exact = f.is_exact() && g.is_exact();
  if (report.window < 0)
    throw RangeError("commutator_window_check: window is empty at this cutoff");

  const SmearedOperator phi_f = smear_truncated(mod, field, f, cutoff);
  const SmearedOperator t_g =
      smear_truncated(mod, FieldSpec::stress_energy(), g, cutoff);
  const std::size_t w = phi_f.offsets[std::size_t(report.window) + 1];
  report.window_dim = w;

  // Window columns first: on levels <= window every intermediate level of
  // the products stays inside the truncation, so the restriction is exact.
  const GaussMat ab = phi_f.matrix * take_cols(t_g.matrix, w);
  const GaussMat ba = t_g.matrix * take_cols(phi_f.matrix, w);
  const GaussMat lhs = take_rows(ab, w) - take_rows(ba, w);

  // [phi(f), T(g)] = phi(f' g - (d-1) f g') with f' = (1/i) d/dtheta; the
  // sign is the one fixed by [L_{-1}, W_1] = -3 W_0.
  const int d = field.conformal_dimension;
  const TestFunction bracket =
      f.derivative() * g - (f * g.derivative()).scaled(GaussianRational(Rational(d - 1)));
  GaussMat rhs = take_block(smear_truncated(mod, field, bracket, cutoff).matrix, w);

  if (field.family == Family::L) {
    // Stress energy against itself picks up the central contribution
    // (c/12) sum_m m (m^2-1) fhat_m ghat_{-m} on the identity.
    GaussianRational central;
    for (const auto& [n, value] : f.coefficients()) {
      const Rational weight = Rational(n) * (Rational(n) * Rational(n) - 1);
      if (weight == 0) continue;
      central += weight * (value * g.coefficient(-n));
    }
    central = (mod.algebra().c / 12) * central;
    for (std::size_t i = 0; i < w; ++i) rhs.at(i, i) += central;
  }

  const GaussMat diff = lhs - rhs;
  report.max_abs_difference = max_magnitude(diff);
  report.max_abs_commutator = max_magnitude(lhs);
  report.exact_match = report.inputs_exact && diff.is_zero();
  report.pass = report.exact_match || report.max_abs_difference <= tol;
  report.commutator = lhs;
  report.expected = rhs;
  return report;
}

// ---------------------------------------------------------------------------
// Truncated spectra
// ---------------------------------------------------------------------------

namespace {

struct StackedGram {
  RatMat gram;
  std::vector<std::vector<Rational>> ldl_rows;
  std::vector<Rational> ldl_diag;
};

StackedGram stacked_gram(GradedModule& mod, const SmearedOperator& op) {
  StackedGram out;
  out.gram = RatMat(op.dim(), op.dim());
  out.ldl_rows.reserve(op.dim());
  for (int level = 0; level <= op.cutoff; ++level) {
    const std::size_t off = op.offsets[std::size_t(level)];
    const RatMat g = quotient_gram(mod, level);
    const QuotientData& q = mod.radical_quotient(level);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < g.cols(); ++j) out.gram.at(off + i, off + j) = g.at(i, j);
      std::vector<Rational> row(off + i);
      for (std::size_t j = 0; j < i; ++j) row[off + j] = q.ldl_rows[i][j];
      out.ldl_rows.push_back(std::move(row));
      out.ldl_diag.push_back(q.ldl_diag[i]);
    }
  }
  return out;
}

void split_parts(const GaussMat& m, RatMat& re, RatMat& im, bool& has_imag) {
  re = RatMat(m.rows(), m.cols());
  im = RatMat(m.rows(), m.cols());
  has_imag = false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      re.at(i, j) = m.at(i, j).re;
      im.at(i, j) = m.at(i, j).im;
      if (m.at(i, j).im != 0) has_imag = true;
    }
}

}  // namespace

std::vector<double> t_min_spectrum_sequence(GradedModule& mod, const TestFunction& g,
                                            const std::vector<int>& cutoffs) {
  if (!g.is_real()) throw DomainError("t_min_spectrum_sequence: requires a real function");
  std::vector<double> out;
  out.reserve(cutoffs.size());
  for (const int n : cutoffs) {
    const SmearedOperator op = smear_truncated(mod, FieldSpec::stress_energy(), g, n);
    const StackedGram sg = stacked_gram(mod, op);
    RatMat m_re, m_im;
    bool has_imag = false;
    split_parts(op.matrix, m_re, m_im, has_imag);

    std::vector<double> eig;
    if (!has_imag) {
      const RatMat form = sg.gram * m_re;
      if (!(form == form.transpose()))
        throw DomainError("t_min_spectrum_sequence: compression is not self-adjoint");
      eig = pencil_eigenvalues_ldl(form, sg.ldl_rows, sg.ldl_diag, nullptr);
    } else {
      // Real doubling of the Hermitian compression: eigenvalues repeat, the
      // minimum is unchanged.
      const RatMat f_re = sg.gram * m_re;
      const RatMat f_im = sg.gram * m_im;
      const std::size_t dim = f_re.rows();
      RatMat form(2 * dim, 2 * dim);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
          form.at(i, j) = f_re.at(i, j);
          form.at(dim + i, dim + j) = f_re.at(i, j);
          form.at(i, dim + j) = -f_im.at(i, j);
          form.at(dim + i, j) = f_im.at(i, j);
        }
      if (!(form == form.transpose()))
        throw DomainError("t_min_spectrum_sequence: compression is not self-adjoint");
      std::vector<std::vector<Rational>> rows2;
      rows2.reserve(2 * dim);
      for (const auto& row : sg.ldl_rows) rows2.push_back(row);
      for (const auto& row : sg.ldl_rows) {
        std::vector<Rational> shifted(dim + row.size());
        for (std::size_t j = 0; j < row.size(); ++j) shifted[dim + j] = row[j];
        rows2.push_back(std::move(shifted));
      }
      std::vector<Rational> diag2 = sg.ldl_diag;
      diag2.insert(diag2.end(), sg.ldl_diag.begin(), sg.ldl_diag.end());
      eig = pencil_eigenvalues_ldl(form, rows2, diag2, nullptr);
    }
    out.push_back(eig.empty() ? 0.0 : eig.front());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local-bound probe
// ---------------------------------------------------------------------------

namespace {

std::vector<cplx> apply_dense(const std::vector<std::vector<cplx>>& m,
                              const std::vector<cplx>& v) {
  std::vector<cplx> out(m.size(), cplx(0.0, 0.0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

double gram_norm(const std::vector<std::vector<double>>& gram, const std::vector<cplx>& v) {
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) acc += std::conj(v[i]) * gram[i][j] * v[j];
  return std::sqrt(std::max(0.0, acc.real()));
}

}  // namespace

ProbeReport local_bound_probe(GradedModule& mod, const TestFunction& g,
                              const std::vector<ProbeSample>& samples, int cutoff) {
  if (mod.algebra().kind != AlgebraKind::W3)
    throw DomainError("local_bound_probe: requires a spin-3 module");
  if (mod.lowest_h() != 0 || mod.lowest_w() != 0)
    throw DomainError("local_bound_probe: requires the vacuum module");
  if (!g.is_real()) throw DomainError("local_bound_probe: requires a real function");
  if (g.min_real_sample() < -1e-12)
    throw DomainError("local_bound_probe: requires a nonnegative function");

  ProbeReport report;
  report.cutoff = cutoff;
  report.r_hat = t_min_spectrum_sequence(mod, g, {cutoff}).front();

  const SmearedOperator w_sq = smear_truncated(mod, FieldSpec::w_field(), g * g, cutoff);
  const SmearedOperator t_g = smear_truncated(mod, FieldSpec::stress_energy(), g, cutoff);
  const std::vector<std::vector<cplx>> w_mat = to_complex(w_sq.matrix);
  std::vector<std::vector<cplx>> t_mat = to_complex(t_g.matrix);
  for (std::size_t i = 0; i < t_mat.size(); ++i) t_mat[i][i] += report.r_hat;

  const std::size_t dim = w_sq.dim();
  std::vector<std::vector<cplx>> t_sq(dim, std::vector<cplx>(dim, cplx(0.0, 0.0)));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t k = 0; k < dim; ++k) {
      if (t_mat[i][k] == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < dim; ++j) t_sq[i][j] += t_mat[i][k] * t_mat[k][j];
    }

  const StackedGram sg = stacked_gram(mod, w_sq);
  std::vector<std::vector<double>> gram(dim, std::vector<double>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) gram[i][j] = to_double(sg.gram.at(i, j));

  for (const ProbeSample& sample : samples) {
    if (sample.level < 0 || 2 * sample.level > cutoff)
      throw DomainError("local_bound_probe: sample level must be at most cutoff/2");
    const std::size_t rank = mod.quotient_rank(sample.level);
    if (sample.coords.size() != rank)
      throw DomainError("local_bound_probe: sample coordinate size mismatch");

    std::vector<cplx> v(dim, cplx(0.0, 0.0));
    const std::size_t off = w_sq.offsets[std::size_t(sample.level)];
    for (std::size_t j = 0; j < rank; ++j) v[off + j] = sample.coords[j];

    ProbeRow row;
    row.label = sample.label;
    row.level = sample.level;
    row.numerator = gram_norm(gram, apply_dense(w_mat, v));
    row.denominator = gram_norm(gram, apply_dense(t_sq, v));
    if (row.denominator < 1e-12) {
      row.skipped = true;
      report.notes.push_back(row.label + ": denominator below 1e-12, sample skipped");
    } else {
      row.ratio = row.numerator / row.denominator;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace walg
