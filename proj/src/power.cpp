#include "plab/power.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "plab/errors.hpp"

namespace plab {
namespace {

mpz_class mpz_of(std::int64_t v) {
  mpz_class z;
  mpz_set_si(z.get_mpz_t(), v);
  return z;
}

mpz_class mpz_pow(const mpz_class& b, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

void validate(const PowerBound& b) {
  if (b.coef <= Rational(0)) throw DomainError("power bound needs a positive coefficient");
  if (b.base < 1) throw DomainError("power bound needs base >= 1");
}

// value^q = num / den as exact integers, q = exponent denominator.
struct Raised {
  mpz_class num;
  mpz_class den;
  unsigned long q;
};

Raised raise(const PowerBound& b) {
  validate(b);
  const auto q = static_cast<unsigned long>(b.exponent.den());
  const std::int64_t p = b.exponent.num();
  Raised r{mpz_pow(mpz_of(b.coef.num()), q), mpz_pow(mpz_of(b.coef.den()), q), q};
  const mpz_class xp = mpz_pow(mpz_of(b.base), static_cast<unsigned long>(p < 0 ? -p : p));
  if (p >= 0) {
    r.num *= xp;
  } else {
    r.den *= xp;
  }
  return r;
}

std::int64_t to_int64_saturating(const mpz_class& z) {
  if (z > mpz_of(std::numeric_limits<std::int64_t>::max())) return std::numeric_limits<std::int64_t>::max();
  if (z < mpz_of(std::numeric_limits<std::int64_t>::min())) return std::numeric_limits<std::int64_t>::min();
  return mpz_get_si(z.get_mpz_t());
}

}  // namespace

mpz_class to_mpz(std::int64_t v) { return mpz_of(v); }

mpz_class to_mpz(__int128 v) {
  const bool neg = v < 0;
  const unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  mpz_class z;
  mpz_set_ui(z.get_mpz_t(), static_cast<unsigned long>(u >> 64));
  z <<= 64;
  mpz_class low;
  mpz_set_ui(low.get_mpz_t(), static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL));
  z += low;
  return neg ? mpz_class(-z) : z;
}

std::int64_t to_int64(const mpz_class& z) {
  if (!mpz_fits_slong_p(z.get_mpz_t())) throw OverflowError("integer does not fit in 64 bits");
  return mpz_get_si(z.get_mpz_t());
}

double PowerBound::to_double() const {
  return coef.to_double() * std::pow(static_cast<double>(base), exponent.to_double());
}

std::string PowerBound::str() const {
  std::string s;
  if (coef != Rational(1) || base == 1 || exponent == Rational(0)) s = coef.str();
  if (base != 1 && exponent != Rational(0)) {
    if (!s.empty()) s += "*";
    s += std::to_string(base) + "^(" + exponent.str() + ")";
  }
  return s;
}

mpz_class PowerBound::floor() const {
  Raised r = raise(*this);
  mpz_class v = r.num / r.den;  // floor, both positive
  mpz_class root;
  mpz_root(root.get_mpz_t(), v.get_mpz_t(), r.q);
  return root;
}

bool PowerBound::is_integer() const {
  Raised r = raise(*this);
  mpz_class f = floor();
  return mpz_pow(f, r.q) * r.den == r.num;
}

std::int64_t PowerBound::max_below() const { return to_int64_saturating(ceil() - 1); }

std::int64_t PowerBound::min_above() const { return to_int64_saturating(floor() + 1); }

PowerBound operator*(const PowerBound& a, const PowerBound& b) {
  const bool a_const = a.base == 1 || a.exponent == Rational(0);
  const bool b_const = b.base == 1 || b.exponent == Rational(0);
  if (a_const) return {a.coef * b.coef, b.base, b.exponent};
  if (b_const) return {a.coef * b.coef, a.base, a.exponent};
  if (a.base != b.base) throw DomainError("cannot multiply power bounds with different bases");
  return {a.coef * b.coef, a.base, a.exponent + b.exponent};
}

int compare(const mpz_class& n, const PowerBound& b) {
  if (n <= 0) return -1;
  Raised r = raise(b);
  mpz_class lhs = mpz_pow(n, r.q) * r.den;
  int c = cmp(lhs, r.num);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int compare(std::int64_t n, const PowerBound& b) { return compare(mpz_of(n), b); }

int compare(const PowerBound& a, const PowerBound& b) {
  validate(a);
  validate(b);
  // Raise both to the power Q = lcm of exponent denominators.
  const std::int64_t qa = a.exponent.den();
  const std::int64_t qb = b.exponent.den();
  const std::int64_t q = qa / std::gcd(qa, qb) * qb;
  auto side = [q](const PowerBound& v) {
    const auto uq = static_cast<unsigned long>(q);
    const std::int64_t p = v.exponent.num() * (q / v.exponent.den());
    mpz_class num = mpz_pow(mpz_of(v.coef.num()), uq);
    mpz_class den = mpz_pow(mpz_of(v.coef.den()), uq);
    const mpz_class xp = mpz_pow(mpz_of(v.base), static_cast<unsigned long>(p < 0 ? -p : p));
    if (p >= 0) {
      num *= xp;
    } else {
      den *= xp;
    }
    return std::pair{num, den};
  };
  auto [na, da] = side(a);
  auto [nb, db] = side(b);
  const int c = cmp(na * db, nb * da);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::int64_t floor_pow(std::int64_t x, Rational e) {
  mpz_class f = PowerBound::power(x, e).floor();
  if (f > mpz_of(std::numeric_limits<std::int64_t>::max())) throw CapacityError("floor(x^e) exceeds 64 bits");
  return mpz_get_si(f.get_mpz_t());
}

}  // namespace plab
