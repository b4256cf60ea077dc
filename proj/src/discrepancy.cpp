#include "plab/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <thread>

#include "plab/errors.hpp"
#include "plab/power.hpp"

namespace plab {
namespace {

using i128 = __int128;

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("progression sum overflows int64");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("discrepancy numerator overflows int64");
  return r;
}

std::int64_t residue(std::int64_t a, std::int64_t d) {
  std::int64_t r = a % d;
  return r < 0 ? r + d : r;
}

void require_coprime(std::int64_t a, std::int64_t d) {
  if (d < 1) throw DomainError("modulus must be >= 1");
  if (std::gcd(a, d) != 1) {
    throw DomainError("gcd(" + std::to_string(a) + ", " + std::to_string(d) + ") != 1");
  }
}

// Sum of f(n) over n <= x with n = c (mod d), 0 <= c < d.
std::int64_t progression_sum(FunctionView f, std::int64_t x, std::int64_t d, std::int64_t c) {
  const std::int64_t top = std::min(x, f.last());
  if (top < f.first) return 0;
  std::int64_t n = f.first + residue(c - f.first, d);
  std::int64_t s = 0;
  for (; n <= top; n += d) s = checked_add(s, f.values[static_cast<std::size_t>(n - f.first)]);
  return s;
}

mpq_class mpq_of(i128 num, std::int64_t den) {
  mpq_class q(to_mpz(num), to_mpz(den));
  q.canonicalize();
  return q;
}

// Accumulates |numerator| / phi grouped by phi so that big-rational work is
// one addition per distinct denominator.
class AbsAccumulator {
 public:
  void add(std::int64_t abs_numerator, std::int64_t phi) {
    i128& slot = by_phi_[phi];
    slot += abs_numerator;
  }
  void merge(const AbsAccumulator& o) {
    for (const auto& [phi, v] : o.by_phi_) by_phi_[phi] += v;
  }
  mpq_class total() const {
    mpq_class s(0);
    for (const auto& [phi, v] : by_phi_) s += mpq_of(v, phi);
    return s;
  }

 private:
  std::map<std::int64_t, i128> by_phi_;
};

// Runs body(begin, end, acc) on `workers` contiguous slices of [0, count) and
// merges the accumulators in slice order.
template <typename Body>
AbsAccumulator fan_out(std::size_t count, int workers, Body body) {
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(count, 1));
  std::vector<AbsAccumulator> parts(w);
  std::vector<std::exception_ptr> errors(w);
  auto slice = [&](std::size_t i) {
    const std::size_t begin = count * i / w;
    const std::size_t end = count * (i + 1) / w;
    try {
      body(begin, end, parts[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (w == 1) {
    slice(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::size_t i = 0; i < w; ++i) threads.emplace_back(slice, i);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  AbsAccumulator total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

// multiple_sum[e] = sum of f(n) over n <= x with e | n, for e <= max_e.
std::vector<std::int64_t> multiple_sums(FunctionView f, std::int64_t x, std::int64_t max_e) {
  std::vector<std::int64_t> s(static_cast<std::size_t>(max_e + 1), 0);
  for (std::int64_t e = 1; e <= max_e; ++e) s[static_cast<std::size_t>(e)] = progression_sum(f, x, e, 0);
  return s;
}

// sum_{n <= x, (n,d)=1} f(n) by Moebius inversion over the squarefree divisors of rad(d).
std::int64_t coprime_sum(const std::vector<std::int64_t>& primes, const std::vector<std::int64_t>& mult_sums) {
  const std::size_t w = primes.size();
  std::int64_t s = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << w); ++mask) {
    std::int64_t e = 1;
    int sign = 1;
    for (std::size_t i = 0; i < w; ++i) {
      if (mask & (std::size_t{1} << i)) {
        e *= primes[i];
        sign = -sign;
      }
    }
    const std::int64_t term = mult_sums[static_cast<std::size_t>(e)];
    s = sign > 0 ? checked_add(s, term) : checked_add(s, -term);
  }
  return s;
}

void check_table_covers(const ArithTable& f, std::int64_t x) {
  if (x > f.limit()) {
    throw CapacityError("x = " + std::to_string(x) + " beyond table limit " + std::to_string(f.limit()));
  }
}

std::int64_t count_in_class(IntRange box, std::int64_t c, std::int64_t m) {
  // #{n in [lo, hi) : n = c (mod m)}
  auto upto = [&](std::int64_t t) {  // #{n <= t : n = c (m)} relative count, floor division
    const std::int64_t v = t - c;
    return v >= 0 ? v / m : -((-v + m - 1) / m);
  };
  return upto(box.hi - 1) - upto(box.lo - 1);
}

}  // namespace

mpq_class DiscrepancyValue::value() const {
  mpq_class q(to_mpz(numerator), to_mpz(denominator));
  q.canonicalize();
  return q;
}

ModulusFilter ModulusFilter::standard(Rational theta, Rational varpi, std::int64_t a) {
  ModulusFilter f;
  f.theta = theta;
  f.varpi = varpi;
  f.smooth_exponent = Rational(1, 8) - Rational(4) * varpi;
  f.a = a;
  return f;
}

void ModulusFilter::validate() const {
  if (!(Rational(0) < theta && theta < Rational(1))) throw DomainError("filter needs 0 < theta < 1");
  if (!(Rational(0) <= varpi && varpi < theta)) throw DomainError("filter needs 0 <= varpi < theta");
  if (a == 0) throw DomainError("filter residue a must be nonzero");
}

DiscrepancyValue delta(const ArithTable& f, std::int64_t x, std::int64_t d, std::int64_t a) {
  check_table_covers(f, x);
  return delta(f.view(), x, d, a);
}

DiscrepancyValue delta(FunctionView f, std::int64_t x, std::int64_t d, std::int64_t a) {
  require_coprime(a, d);
  const PrimeFactorization fd = factorize(d);
  const std::int64_t phi = euler_phi(fd);
  const std::int64_t rad = fd.radical();
  const std::int64_t in_class = progression_sum(f, x, d, residue(a, d));
  std::int64_t coprime = 0;
  const std::int64_t top = std::min(x, f.last());
  for (std::int64_t n = f.first; n <= top; ++n) {
    if (std::gcd(n, rad) == 1) coprime = checked_add(coprime, f(n));
  }
  return {checked_add(checked_mul(phi, in_class), -coprime), phi};
}

std::vector<std::int64_t> admissible_moduli(std::int64_t x, const ModulusFilter& filter) {
  filter.validate();
  if (x < 1) throw DomainError("x must be >= 1");
  const std::int64_t d_max = PowerBound::power(x, filter.theta).max_below();
  std::int64_t d_min = 2;
  if (filter.lower_exponent) d_min = std::max(d_min, PowerBound::power(x, *filter.lower_exponent).min_above());
  std::vector<std::int64_t> out;
  if (d_max < d_min) return out;
  const std::int64_t y_floor = floor_pow(x, filter.varpi);
  const std::int64_t smooth_min = PowerBound::power(x, filter.smooth_exponent).min_above();
  const Factorizer fz(d_max);
  for (std::int64_t d = d_min; d <= d_max; ++d) {
    if (std::gcd(d, filter.a) != 1) continue;
    const PrimeFactorization f = fz.factorize(d);
    if (filter.squarefree_only && f.radical() != d) continue;
    if (smooth_part(f, y_floor) < smooth_min) continue;
    out.push_back(d);
  }
  return out;
}

MeanValueSum sum_abs_delta(FunctionView f, std::int64_t x, const std::vector<std::int64_t>& moduli, std::int64_t a,
                           int workers) {
  MeanValueSum result;
  result.modulus_count = static_cast<std::int64_t>(moduli.size());
  if (moduli.empty()) return result;
  for (std::int64_t d : moduli) require_coprime(a, d);
  const std::int64_t max_d = *std::max_element(moduli.begin(), moduli.end());
  const std::vector<std::int64_t> mult = multiple_sums(f, x, max_d);
  const Factorizer fz(max_d);
  AbsAccumulator acc = fan_out(moduli.size(), workers, [&](std::size_t begin, std::size_t end, AbsAccumulator& part) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::int64_t d = moduli[i];
      const PrimeFactorization fd = fz.factorize(d);
      const std::int64_t phi = euler_phi(fd);
      const std::int64_t num =
          checked_add(checked_mul(phi, progression_sum(f, x, d, residue(a, d))), -coprime_sum(fd.primes(), mult));
      part.add(num < 0 ? -num : num, phi);
    }
  });
  result.sum = acc.total();
  return result;
}

MeanValueSum sum_theorem1(const ArithTable& tau_k, std::int64_t x, const ModulusFilter& filter, int workers) {
  check_table_covers(tau_k, x);
  return sum_abs_delta(tau_k.view(), x, admissible_moduli(x, filter), filter.a, workers);
}

MeanValueSum sum_theorem1(std::int64_t x, int k, const ModulusFilter& filter, int workers) {
  return sum_theorem1(sieve_tau_k(x, k), x, filter, workers);
}

MeanValueSum sum_bv(const ArithTable& tau_k, std::int64_t x, const Rational& theta, int workers) {
  if (!(Rational(0) < theta && theta < Rational(1))) throw DomainError("sum_bv needs 0 < theta < 1");
  check_table_covers(tau_k, x);
  const std::int64_t d_max = PowerBound::power(x, theta).max_below();
  MeanValueSum result;
  if (d_max < 2) return result;
  result.modulus_count = d_max - 1;
  const FunctionView f = tau_k.view();
  const std::int64_t top = std::min(x, f.last());
  AbsAccumulator acc = fan_out(static_cast<std::size_t>(d_max - 1), workers,
                               [&](std::size_t begin, std::size_t end, AbsAccumulator& part) {
                                 std::vector<std::int64_t> bucket;
                                 for (std::size_t i = begin; i < end; ++i) {
                                   const auto d = static_cast<std::int64_t>(i) + 2;
                                   bucket.assign(static_cast<std::size_t>(d), 0);
                                   std::int64_t r = residue(f.first, d);
                                   for (std::int64_t n = f.first; n <= top; ++n) {
                                     bucket[static_cast<std::size_t>(r)] += f.values[static_cast<std::size_t>(n - f.first)];
                                     if (++r == d) r = 0;
                                   }
                                   std::int64_t coprime = 0;
                                   std::int64_t phi = 0;
                                   for (std::int64_t c = 0; c < d; ++c) {
                                     if (std::gcd(c, d) != 1) continue;
                                     coprime = checked_add(coprime, bucket[static_cast<std::size_t>(c)]);
                                     ++phi;
                                   }
                                   std::int64_t worst = 0;
                                   for (std::int64_t c = 0; c < d; ++c) {
                                     if (std::gcd(c, d) != 1) continue;
                                     std::int64_t num = checked_add(checked_mul(phi, bucket[static_cast<std::size_t>(c)]), -coprime);
                                     worst = std::max(worst, num < 0 ? -num : num);
                                   }
                                   part.add(worst, phi);
                                 }
                               });
  result.sum = acc.total();
  return result;
}

MeanValueSum sum_bv(std::int64_t x, int k, const Rational& theta, int workers) {
  return sum_bv(sieve_tau_k(x, k), x, theta, workers);
}

Rational sw_surrogate(IntRange box, std::int64_t q, std::int64_t r, std::int64_t a) {
  if (q < 1 || r < 1) throw DomainError("sw_surrogate needs q, r >= 1");
  require_coprime(a, r);
  const PrimeFactorization fq = factorize(q);
  const PrimeFactorization fqr = factorize(q * r);
  const std::int64_t phi_r = euler_phi(factorize(r));
  const std::int64_t ar = residue(a, r);

  // n = a (r) together with e | n is impossible when gcd(e, r) > 1, so only
  // divisors e of rad(q) coprime to r contribute; CRT fixes n mod e*r.
  std::vector<std::int64_t> q_primes;
  for (std::int64_t p : fq.primes()) {
    if (r % p != 0) q_primes.push_back(p);
  }
  std::int64_t in_class = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << q_primes.size()); ++mask) {
    std::int64_t e = 1;
    int sign = 1;
    for (std::size_t i = 0; i < q_primes.size(); ++i) {
      if (mask & (std::size_t{1} << i)) {
        e *= q_primes[i];
        sign = -sign;
      }
    }
    // c = 0 (e), c = ar (r): c = e * t with e t = ar (r).
    std::int64_t t = 0;
    while ((e * t - ar) % r != 0) ++t;
    in_class += sign * count_in_class(box, e * t, e * r);
  }

  std::int64_t coprime = 0;
  const std::vector<std::int64_t> qr_primes = fqr.primes();
  for (std::size_t mask = 0; mask < (std::size_t{1} << qr_primes.size()); ++mask) {
    std::int64_t e = 1;
    int sign = 1;
    for (std::size_t i = 0; i < qr_primes.size(); ++i) {
      if (mask & (std::size_t{1} << i)) {
        e *= qr_primes[i];
        sign = -sign;
      }
    }
    coprime += sign * count_in_class(box, 0, e);
  }
  return Rational(in_class) - Rational(coprime, phi_r);
}

double envelope_eval(const BoundEnvelope& env, double x, std::optional<double> n) {
  if (!(x > 1.0)) throw DomainError("envelope needs x > 1");
  const double lx = std::log(x);
  switch (env.form) {
    case EnvelopeForm::thm1: return x * std::exp(-std::sqrt(lx));
    case EnvelopeForm::thm2: return x * std::exp(-std::pow(lx, 2.0 / 3.0));
    case EnvelopeForm::logpower: return x / std::pow(lx, env.A);
    case EnvelopeForm::sw:
      if (!n) throw DomainError("sw envelope needs N");
      return std::pow(x, -env.kappa) * *n;
  }
  return 0.0;
}

Rational theta_k(int k) {
  switch (k) {
    case 2: return {2, 3};
    case 3: return {21, 41};
    case 4: return {1, 2};
    case 5: return {9, 20};
    case 6: return {5, 12};
    default:
      if (k < 2) throw DomainError("theta_k needs k >= 2");
      return {8, 3 * static_cast<std::int64_t>(k)};
  }
}

std::string to_string(EnvelopeForm form) {
  switch (form) {
    case EnvelopeForm::thm1: return "thm1";
    case EnvelopeForm::thm2: return "thm2";
    case EnvelopeForm::logpower: return "logpower";
    case EnvelopeForm::sw: return "sw";
  }
  return "?";
}

EnvelopeForm envelope_form_from_string(const std::string& s) {
  if (s == "thm1") return EnvelopeForm::thm1;
  if (s == "thm2") return EnvelopeForm::thm2;
  if (s == "logpower") return EnvelopeForm::logpower;
  if (s == "sw") return EnvelopeForm::sw;
  throw DomainError("unknown envelope form '" + s + "'");
}

}  // namespace plab
