#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "plab/rational.hpp"

namespace plab {

// The positive real coef * base^exponent with rational coef and exponent.
// Thresholds such as x^theta or x^varpi * R are irrational in general; keeping
// them in this form lets every integer comparison against them be decided
// exactly (n^q against coef^q * base^p in big integers).
struct PowerBound {
  Rational coef{1};
  std::int64_t base = 1;
  Rational exponent{0};

  static PowerBound constant(Rational c) { return {c, 1, Rational(0)}; }
  static PowerBound power(std::int64_t base, Rational exponent) { return {Rational(1), base, exponent}; }

  double to_double() const;
  std::string str() const;

  // Greatest integer <= value, and whether value is itself that integer.
  mpz_class floor() const;
  bool is_integer() const;
  mpz_class ceil() const { return is_integer() ? floor() : mpz_class(floor() + 1); }

  // Largest n with n < value; smallest n with n > value (as int64, saturating
  // at INT64_MAX).
  std::int64_t max_below() const;
  std::int64_t min_above() const;
};

// Product of two bounds. Bases must agree unless one side is a pure constant.
PowerBound operator*(const PowerBound& a, const PowerBound& b);

// Sign of n - value.
int compare(const mpz_class& n, const PowerBound& b);
int compare(std::int64_t n, const PowerBound& b);
// Sign of a - b for arbitrary bases.
int compare(const PowerBound& a, const PowerBound& b);

inline bool less_than(std::int64_t n, const PowerBound& b) { return compare(n, b) < 0; }
inline bool greater_than(std::int64_t n, const PowerBound& b) { return compare(n, b) > 0; }

mpz_class to_mpz(std::int64_t v);
mpz_class to_mpz(__int128 v);
// Throws OverflowError when z does not fit.
std::int64_t to_int64(const mpz_class& z);

// floor(x^e) for x >= 1.
std::int64_t floor_pow(std::int64_t x, Rational e);

}  // namespace plab
