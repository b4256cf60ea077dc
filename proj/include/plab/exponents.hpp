#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plab/rational.hpp"

namespace plab {

inline constexpr int kMaxSubsetK = 25;

// Rational delta >= log 2 / log x with denominator 10^6, certified exactly
// (x^p >= 2^q). Every log2/logx term is replaced by this bound.
Rational log2_over_logx_bound(std::int64_t x);

// Logarithmic box sizes N_i = x^{nu_i}: nu_1 >= ... >= nu_k >= 0 and
// 1 <= sum nu < 1 + delta.
struct ExponentTuple {
  std::vector<Rational> nu;
  std::int64_t x = 1'000'000;
  Rational varpi{1, 1168};
  Rational delta;  // upper bound for log 2 / log x

  ExponentTuple(std::vector<Rational> nu, std::int64_t x, Rational varpi);
  ExponentTuple(std::vector<Rational> nu, std::int64_t x, Rational varpi, Rational delta);

  int k() const noexcept { return static_cast<int>(nu.size()); }
  Rational total() const;
  Rational subset_sum(std::uint32_t mask) const;  // bit i <-> index i + 1
  // Both ordering and total-size conditions; throws DomainError naming the failure.
  void validate() const;
  bool is_normalized() const noexcept;
};

// Medium-size interval [3/8 + 8 varpi, 5/8 - 8 varpi] and the large-factor threshold.
Rational medium_low(const Rational& varpi);
Rational medium_high(const Rational& varpi);

// The case analysis needs 1/2 - 32 varpi > 3/8 + 8 varpi, i.e. varpi < 1/320.
bool varpi_admissible(const Rational& varpi);
void require_varpi_admissible(const Rational& varpi);

enum class CaseVariant { A, B, C };
std::string to_string(CaseVariant v);

struct CaseLabel {
  CaseVariant variant = CaseVariant::B;
  std::vector<int> witness;  // 1-based, ascending; only for C
  std::vector<int> raw;      // the qualifying subset before complement normalization
  Rational witness_sum;
};

// A: nu_1 >= 5/8 - 8 varpi. C: some subset sum lies in the medium interval;
// the returned witness is the lexicographically smallest subset I (after
// replacing I by its complement when sum_I >= 1/2 + delta/2). B otherwise.
CaseLabel classify(const ExponentTuple& t);

enum class Lemma1Status { holds, counterexample, inapplicable, varpi_too_large };
std::string to_string(Lemma1Status s);

struct Lemma1Report {
  Lemma1Status status = Lemma1Status::inapplicable;
  bool varpi_ok = false;
  bool large_factor_bound = false;  // nu_1 < 5/8 - 8 varpi
  bool no_medium_subset = false;    // no subset sum in the medium interval
  std::optional<int> l;             // 3 <= l <= k
  bool l_valid = false;             // nu_2+..+nu_l > 5/8-8varpi and nu_2+..+nu_{l-1} < 3/8+8varpi
  bool nu_l_bound = false;          // nu_l > 1/4 - 16 varpi
  bool pair_bound = false;          // nu_2 + nu_3 > 5/8 - 8 varpi
  bool conclusion = false;          // nu_1 + nu_4 + ... + nu_k < 3/8 + 8 varpi + delta
  Rational conclusion_margin;       // (3/8 + 8 varpi + delta) - (nu_1 + nu_4 + ... + nu_k)
};

Lemma1Report lemma1_check(const ExponentTuple& t);

struct Lemma1GridSummary {
  int k = 0;
  std::int64_t tuples = 0;  // grid tuples satisfying the ordering and size conditions
  std::int64_t applicable = 0;
  std::int64_t counterexamples = 0;
  std::int64_t case_a = 0;
  std::int64_t case_b = 0;
  std::int64_t case_c = 0;
  Rational min_margin;  // smallest conclusion margin over applicable tuples
  std::vector<ExponentTuple> failures;
  std::vector<std::pair<ExponentTuple, CaseLabel>> witnesses;  // case C tuples, if collected
};

// All multiples of 1/denominator in [0, 1 + delta).
std::vector<Rational> multiples_grid(std::int64_t denominator, const Rational& delta);
// All reduced p/q with q <= max_denominator in [0, 1 + delta).
std::vector<Rational> farey_grid(std::int64_t max_denominator, const Rational& delta);

// Exhaustive check of every nonincreasing k-tuple from `values`.
Lemma1GridSummary lemma1_grid(int k, const std::vector<Rational>& values, std::int64_t x, const Rational& varpi,
                              int workers = 1, bool collect_witnesses = false);

struct DispersionRanges {
  Rational n_exponent;  // sum over the witness
  Rational m_exponent;  // sum over the complement
  int branch = 1;       // 1: N < x^{1/2-4varpi}, 2 otherwise
  Rational r_low, r_high;
  Rational qr_low, qr_high;
  Rational q_low, q_high;
};

DispersionRanges dispersion_ranges(const ExponentTuple& t, const std::vector<int>& witness, const Rational& theta,
                                   const Rational& varpi, const Rational& eps);

// 43 (theta - 1/2) + 27 varpi < 1
bool polymath_feasible(const Rational& theta, const Rational& varpi);
// theta == 1/2 + 2 varpi
bool theta_varpi_relation(const Rational& theta, const Rational& varpi);

std::vector<Rational> parse_rational_list(const std::string& csv);
std::string join(const std::vector<Rational>& v);
std::string join(const std::vector<int>& v);

}  // namespace plab
