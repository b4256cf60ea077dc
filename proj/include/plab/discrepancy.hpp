#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plab/arith.hpp"
#include "plab/rational.hpp"

namespace plab {

// Delta_f(x; d, a) scaled by phi(d):
//   numerator = phi(d) * sum_{n<=x, n=a (d)} f(n) - sum_{n<=x, (n,d)=1} f(n).
struct DiscrepancyValue {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;  // phi(d)

  mpq_class value() const;
  double to_double() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator==(const DiscrepancyValue&, const DiscrepancyValue&) = default;
};

// Which moduli d enter a filtered mean-value sum:
//   d < x^theta, d > 1, (d, a) = 1, optionally mu(d)^2 = 1,
//   gcd(d, P(x^varpi)) > x^smooth_exponent, and optionally d > x^lower_exponent.
struct ModulusFilter {
  Rational theta{1, 2};
  Rational varpi{0};
  bool squarefree_only = true;
  Rational smooth_exponent{1, 8};
  std::int64_t a = 1;
  std::optional<Rational> lower_exponent;

  // The summation set of the filtered estimate: smooth exponent 1/8 - 4 varpi.
  static ModulusFilter standard(Rational theta, Rational varpi, std::int64_t a = 1);
  void validate() const;
};

enum class EnvelopeForm { thm1, thm2, logpower, sw };

struct BoundEnvelope {
  EnvelopeForm form = EnvelopeForm::thm1;
  double A = 2.0;      // logpower: x / (log x)^A
  double kappa = 0.1;  // sw: x^(-kappa) N
};

// Exact result of a mean-value sum. The sum is reduced, so it is identical
// however the moduli were split across workers.
struct MeanValueSum {
  mpq_class sum{0};
  std::int64_t modulus_count = 0;
};

// Half-open integer interval [lo, hi).
struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t size() const noexcept { return hi > lo ? hi - lo : 0; }
  bool empty() const noexcept { return hi <= lo; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

DiscrepancyValue delta(const ArithTable& f, std::int64_t x, std::int64_t d, std::int64_t a);
// f is taken to vanish outside the view.
DiscrepancyValue delta(FunctionView f, std::int64_t x, std::int64_t d, std::int64_t a);

std::vector<std::int64_t> admissible_moduli(std::int64_t x, const ModulusFilter& filter);

// Sum over `moduli` of |Delta_f(x; d, a)|, fanned out over `workers` threads.
MeanValueSum sum_abs_delta(FunctionView f, std::int64_t x, const std::vector<std::int64_t>& moduli, std::int64_t a,
                           int workers = 1);

MeanValueSum sum_theorem1(const ArithTable& tau_k, std::int64_t x, const ModulusFilter& filter, int workers = 1);
MeanValueSum sum_theorem1(std::int64_t x, int k, const ModulusFilter& filter, int workers = 1);

// Sum over 1 < d < x^theta of max over reduced residues a of |Delta(x; d, a)|.
MeanValueSum sum_bv(const ArithTable& tau_k, std::int64_t x, const Rational& theta, int workers = 1);
MeanValueSum sum_bv(std::int64_t x, int k, const Rational& theta, int workers = 1);

// sum_{n in box, n = a (r), (n,q)=1} 1  -  (1/phi(r)) sum_{n in box, (n,qr)=1} 1
Rational sw_surrogate(IntRange box, std::int64_t q, std::int64_t r, std::int64_t a);

double envelope_eval(const BoundEnvelope& env, double x, std::optional<double> n = std::nullopt);

// Level of distribution exponents for tau_k: 2/3, 21/41, 1/2, 9/20, 5/12, then 8/(3k).
Rational theta_k(int k);

std::string to_string(EnvelopeForm form);
EnvelopeForm envelope_form_from_string(const std::string& s);

}  // namespace plab
