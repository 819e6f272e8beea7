#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "walg/errors.hpp"

namespace walg {

// Exact scalar type used throughout the symbolic layer.  All structure
// constants, Gram entries and module coordinates are mpq_class; floats appear
// only in eigensolves and the circle module's grid numerics.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p/q" or "p" (optional leading '-').  This is the wire format for
// rationals in config files, JSON reports and CSV exports.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

// Exact complex scalar a + b*i with rational a, b.  Sufficient for every
// complex quantity the exact layer produces: deformed-mode coefficients with
// real or purely imaginary parameters, and trigonometric-polynomial
// coefficients with rational real/imaginary parts.
struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i() { return GaussianRational(Rational(0), Rational(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussianRational conj() const { return {re, -im}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }
  friend GaussianRational operator*(const Rational& s, const GaussianRational& a) {
    return {s * a.re, s * a.im};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  // |z|^2, exact.
  Rational norm_sq() const { return re * re + im * im; }
};

std::string to_string(const GaussianRational& z);

}  // namespace walg
