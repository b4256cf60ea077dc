#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plab/power.hpp"
#include "plab/rational.hpp"

namespace plab {

// d = d0 d1 d2 split by prime size: d0 from p <= z0, d1 from z0 < p <= z1,
// d2 from p > z1.
struct TriFactorization {
  std::int64_t d = 1;
  std::int64_t d0 = 1;
  std::int64_t d1 = 1;
  std::int64_t d2 = 1;
  std::int64_t z0_floor = 0;
  std::int64_t z1_floor = 0;
  std::vector<std::int64_t> d1_primes;  // ascending
};

TriFactorization tri_factorize(std::int64_t d, const PowerBound& z0, const PowerBound& z1);

enum class WindowBranch { low, high };
std::string to_string(WindowBranch b);

// The open window (R, ratio * R).
struct WindowQuery {
  PowerBound R;
  PowerBound ratio;
  WindowBranch branch = WindowBranch::low;
};

class SearchFailure : public std::runtime_error {
 public:
  SearchFailure(const std::string& what, std::optional<std::int64_t> oracle_divisor)
      : std::runtime_error(what), oracle_divisor_(oracle_divisor) {}
  // What exhaustive divisor enumeration found for the same window.
  std::optional<std::int64_t> oracle_divisor() const noexcept { return oracle_divisor_; }
  bool oracle_found() const noexcept { return oracle_divisor_.has_value(); }

 private:
  std::optional<std::int64_t> oracle_divisor_;
};

// Greedy construction: start from d0 (low) or d0*d2 (high) and multiply in the
// primes of d1 in ascending order until the product first exceeds R. The
// result r divides d, lies in (R, ratio R) and has (d/r, P(z0)) = 1.
std::int64_t find_divisor_in_window(const TriFactorization& tf, const WindowQuery& q);

// Smallest divisor r of d with R < r < ratio R and d0 | r, by enumeration.
std::optional<std::int64_t> brute_force_window(std::int64_t d, std::int64_t z0_floor, const PowerBound& R,
                                               const PowerBound& ratio);

struct Lemma2Params {
  std::int64_t x = 100'000;
  Rational theta{33, 50};
  Rational varpi{2, 25};
  Rational eps{1, 20};
  PowerBound z0 = PowerBound::constant(Rational(2));

  PowerBound z1() const { return PowerBound::power(x, varpi); }
  PowerBound ratio() const { return PowerBound::power(x, varpi); }
  void validate() const;
};

// exp((log x)^{1/4}), the tiny-prime threshold of the construction; reported only.
double reference_z0(double x);

struct Lemma2Hypotheses {
  bool squarefree = false;
  bool size_range = false;    // x^{1/2-eps} < d < x^theta
  bool tiny_part = false;     // (d, P(z0)) < x^varpi
  bool smooth_part = false;   // (d, P(x^varpi)) > x^{1/8-4varpi}
  bool theta_relation = false;
  bool all() const noexcept { return squarefree && size_range && tiny_part && smooth_part; }
};

Lemma2Hypotheses lemma2_hypotheses(std::int64_t d, const Lemma2Params& p);

// The branch whose R-range contains x^{r_exponent}; low wins when both do.
std::optional<WindowBranch> branch_for(const Rational& r_exponent, const Rational& varpi);

// Four equally spaced exponents in each branch's range (8 points).
std::vector<Rational> default_r_grid(const Rational& varpi);

struct Lemma2Row {
  std::int64_t d = 0, d0 = 0, d1 = 0, d2 = 0;
  Rational r_exponent;
  double R = 0.0;
  std::optional<std::int64_t> r;
  double ratio_used = 0.0;
  bool oracle_found = false;
  bool oracle_agrees = false;
  WindowBranch branch = WindowBranch::low;
};

struct Lemma2Summary {
  std::int64_t candidates = 0;   // square-free d in the size range
  std::int64_t admissible = 0;   // ... that also pass the tiny/smooth part conditions
  std::int64_t instances = 0;    // admissible d times grid points inside a branch range
  std::int64_t constructed = 0;  // greedy search succeeded
  std::int64_t oracle_found = 0;
  std::int64_t disagreements = 0;
  std::int64_t failures = 0;           // greedy search failed
  std::int64_t bound_violations = 0;   // d0 >= x^varpi or d2 >= x^{3/8+6varpi}
  std::vector<Lemma2Row> rows;

  bool passed() const noexcept {
    return instances > 0 && failures == 0 && disagreements == 0 && bound_violations == 0;
  }
};

struct Lemma2Options {
  bool enforce_smooth_part = true;  // false drops the (d, P(x^varpi)) condition
  bool keep_rows = true;
  int workers = 1;
};

Lemma2Summary lemma2_verify_range(const Lemma2Params& p, const std::vector<Rational>& r_grid,
                                  const Lemma2Options& opt = {});

}  // namespace plab
