#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "plab/discrepancy.hpp"
#include "plab/rational.hpp"

namespace plab {

inline constexpr std::int64_t kDefaultBoxWorkCap = 200'000'000;
inline constexpr std::int64_t kDefaultPartitionCap = 1'000'000;

// k short multiplicative intervals [N_i, (1+rho) N_i) whose indicator
// functions are convolved into gamma. Lengths and rho are exact rationals, so
// integer membership N_i <= n < (1+rho) N_i is decided exactly.
class BoxTuple {
 public:
  BoxTuple(std::int64_t x, std::vector<mpq_class> lengths, mpq_class rho);

  static BoxTuple from_lengths(std::int64_t x, const std::vector<Rational>& lengths, const Rational& rho);
  // N_i = x^{nu_i} rounded to the nearest integer (halves round up), at least 1.
  static BoxTuple from_exponents(std::int64_t x, const std::vector<Rational>& nu, const Rational& rho);

  int k() const noexcept { return static_cast<int>(lengths_.size()); }
  std::int64_t x() const noexcept { return x_; }
  const std::vector<mpq_class>& lengths() const noexcept { return lengths_; }
  const mpq_class& rho() const noexcept { return rho_; }
  // Integers inside box i.
  const IntRange& box(int i) const { return boxes_.at(static_cast<std::size_t>(i)); }
  const std::vector<IntRange>& boxes() const noexcept { return boxes_; }

  bool is_ordered() const;  // N_k <= ... <= N_1
  // x <= N_1 ... N_k < 2x
  bool product_in_window() const;
  // Number of lattice points prod_i #box_i, saturating at INT64_MAX.
  std::int64_t lattice_points() const;
  std::string describe() const;

 private:
  std::int64_t x_;
  std::vector<mpq_class> lengths_;
  mpq_class rho_;
  std::vector<IntRange> boxes_;
};

// gamma restricted to [first, first + values.size()).
struct GammaTable {
  std::int64_t first = 1;
  std::vector<std::int64_t> values;

  FunctionView view() const noexcept { return {first, values}; }
  std::int64_t operator()(std::int64_t n) const noexcept { return view()(n); }
  std::int64_t last() const noexcept { return first + static_cast<std::int64_t>(values.size()) - 1; }
  std::int64_t mass() const;
};

// Number of ordered tuples (n_1..n_k), n_i in box i, with product n.
std::int64_t gamma_eval(const BoxTuple& bt, std::int64_t n);

GammaTable gamma_sieve(const BoxTuple& bt, std::int64_t work_cap = kDefaultBoxWorkCap);

// Every ordered k-tuple of the boxes [(1+rho)^j, (1+rho)^{j+1}), j >= 0, whose
// product range meets [x, 2x). The gammas of the returned tuples sum to tau_k
// on [x, 2x).
std::vector<BoxTuple> box_partition(std::int64_t x, const Rational& rho, int k,
                                    std::int64_t tuple_cap = kDefaultPartitionCap);

// Sum over admissible moduli of |Delta_gamma(3x; d, a)|.
MeanValueSum sum_theorem2(std::int64_t x, const BoxTuple& bt, const ModulusFilter& filter, int workers = 1);
MeanValueSum sum_theorem2(const GammaTable& gamma, std::int64_t x, const ModulusFilter& filter, int workers = 1);

// The rho the construction prescribes, exp(-(log x)^{7/12}); reported only.
double reference_rho(double x);

}  // namespace plab
