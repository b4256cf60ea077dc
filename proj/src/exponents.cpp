#include "plab/exponents.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "plab/errors.hpp"
#include "plab/power.hpp"

namespace plab {
namespace {

constexpr std::int64_t kDeltaDenominator = 1'000'000;

// Lexicographic order of the ascending index lists encoded by two masks.
bool lex_less(std::uint32_t a, std::uint32_t b) {
  if (a == b) return false;
  const std::uint32_t diff = a ^ b;
  const std::uint32_t low = diff & (~diff + 1);
  const std::uint32_t above = ~((low << 1) - 1);  // bits strictly above `low`
  // The set holding `low` is smaller unless the other set stops there.
  if (a & low) return (b & above) != 0;
  return (a & above) == 0;
}

std::vector<int> indices(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i) {
    if (mask & (1U << i)) out.push_back(i + 1);
  }
  return out;
}

std::uint32_t full_mask(int k) { return k >= 32 ? ~0U : ((1U << k) - 1); }

// Calls visit(mask, sum) for every nonempty subset, walking a Gray code so
// each step is one rational addition.
template <typename Visit>
void for_each_subset(const ExponentTuple& t, Visit visit) {
  const int k = t.k();
  if (k > kMaxSubsetK) throw CapacityError("subset enumeration capped at k = " + std::to_string(kMaxSubsetK));
  std::uint32_t mask = 0;
  Rational sum(0);
  const std::uint32_t steps = 1U << k;
  for (std::uint32_t step = 1; step < steps; ++step) {
    const int bit = __builtin_ctz(step);
    mask ^= 1U << bit;
    if (mask & (1U << bit)) {
      sum += t.nu[static_cast<std::size_t>(bit)];
    } else {
      sum -= t.nu[static_cast<std::size_t>(bit)];
    }
    visit(mask, sum);
  }
}

bool in_medium(const Rational& s, const Rational& lo, const Rational& hi) { return lo <= s && s <= hi; }

}  // namespace

Rational log2_over_logx_bound(std::int64_t x) {
  if (x < 2) throw DomainError("log 2 / log x needs x >= 2");
  const double approx = std::log(2.0) / std::log(static_cast<double>(x));
  auto p = static_cast<std::int64_t>(std::ceil(approx * kDeltaDenominator));
  mpz_class two_q;
  mpz_ui_pow_ui(two_q.get_mpz_t(), 2, kDeltaDenominator);
  // smallest p (near the float estimate) with x^p >= 2^q
  auto ok = [&](std::int64_t cand) {
    mpz_class xp;
    mpz_ui_pow_ui(xp.get_mpz_t(), static_cast<unsigned long>(x), static_cast<unsigned long>(cand));
    return xp >= two_q;
  };
  while (!ok(p)) ++p;
  while (p > 1 && ok(p - 1)) --p;
  return {p, kDeltaDenominator};
}

ExponentTuple::ExponentTuple(std::vector<Rational> nu_in, std::int64_t x_in, Rational varpi_in)
    : ExponentTuple(std::move(nu_in), x_in, varpi_in, log2_over_logx_bound(x_in)) {}

ExponentTuple::ExponentTuple(std::vector<Rational> nu_in, std::int64_t x_in, Rational varpi_in, Rational delta_in)
    : nu(std::move(nu_in)), x(x_in), varpi(varpi_in), delta(delta_in) {
  validate();
}

Rational ExponentTuple::total() const {
  Rational s(0);
  for (const auto& v : nu) s += v;
  return s;
}

Rational ExponentTuple::subset_sum(std::uint32_t mask) const {
  Rational s(0);
  for (int i = 0; i < k(); ++i) {
    if (mask & (1U << i)) s += nu[static_cast<std::size_t>(i)];
  }
  return s;
}

bool ExponentTuple::is_normalized() const noexcept {
  if (nu.empty()) return false;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] < Rational(0)) return false;
    if (i > 0 && nu[i] > nu[i - 1]) return false;
  }
  const Rational s = total();
  return Rational(1) <= s && s < Rational(1) + delta;
}

void ExponentTuple::validate() const {
  if (nu.empty()) throw DomainError("exponent tuple needs k >= 1");
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] < Rational(0)) throw DomainError("exponents must be >= 0");
    if (i > 0 && nu[i] > nu[i - 1]) throw DomainError("exponents must be nonincreasing");
  }
  const Rational s = total();
  if (s < Rational(1) || !(s < Rational(1) + delta)) {
    throw DomainError("exponent sum " + s.str() + " outside [1, 1 + " + delta.str() + ")");
  }
  if (delta <= Rational(0)) throw DomainError("delta must be positive");
}

Rational medium_low(const Rational& varpi) { return Rational(3, 8) + Rational(8) * varpi; }
Rational medium_high(const Rational& varpi) { return Rational(5, 8) - Rational(8) * varpi; }

bool varpi_admissible(const Rational& varpi) { return Rational(0) <= varpi && varpi < Rational(1, 320); }

void require_varpi_admissible(const Rational& varpi) {
  if (!varpi_admissible(varpi)) throw DomainError("varpi = " + varpi.str() + " violates 0 <= varpi < 1/320");
}

std::string to_string(CaseVariant v) {
  switch (v) {
    case CaseVariant::A: return "A";
    case CaseVariant::B: return "B";
    case CaseVariant::C: return "C";
  }
  return "?";
}

CaseLabel classify(const ExponentTuple& t) {
  require_varpi_admissible(t.varpi);
  if (t.k() > kMaxSubsetK) throw CapacityError("classify capped at k = " + std::to_string(kMaxSubsetK));
  const Rational lo = medium_low(t.varpi);
  const Rational hi = medium_high(t.varpi);
  CaseLabel label;
  if (t.nu.front() >= hi) {
    label.variant = CaseVariant::A;
    return label;
  }
  const Rational half = Rational(1, 2) + t.delta / Rational(2);
  const Rational total = t.total();
  const std::uint32_t all = full_mask(t.k());
  bool found = false;
  std::uint32_t best = 0;
  std::uint32_t best_raw = 0;
  Rational best_sum;
  for_each_subset(t, [&](std::uint32_t mask, const Rational& sum) {
    if (!in_medium(sum, lo, hi)) return;
    const bool keep = sum < half;
    const std::uint32_t w = keep ? mask : (all & ~mask);
    if (!found || lex_less(w, best)) {
      found = true;
      best = w;
      best_raw = mask;
      best_sum = keep ? sum : total - sum;
    } else if (w == best && mask == w) {
      best_raw = mask;
    }
  });
  if (!found) {
    label.variant = CaseVariant::B;
    return label;
  }
  label.variant = CaseVariant::C;
  label.witness = indices(best);
  label.raw = indices(best_raw);
  label.witness_sum = best_sum;
  return label;
}

std::string to_string(Lemma1Status s) {
  switch (s) {
    case Lemma1Status::holds: return "holds";
    case Lemma1Status::counterexample: return "counterexample";
    case Lemma1Status::inapplicable: return "inapplicable";
    case Lemma1Status::varpi_too_large: return "varpi_too_large";
  }
  return "?";
}

Lemma1Report lemma1_check(const ExponentTuple& t) {
  if (t.k() < 4) throw DomainError("lemma1_check needs k >= 4");
  Lemma1Report rep;
  const Rational lo = medium_low(t.varpi);
  const Rational hi = medium_high(t.varpi);
  rep.varpi_ok = varpi_admissible(t.varpi);
  rep.large_factor_bound = t.nu[0] < hi;
  rep.no_medium_subset = true;
  for_each_subset(t, [&](std::uint32_t, const Rational& sum) {
    if (in_medium(sum, lo, hi)) rep.no_medium_subset = false;
  });

  // Conclusion: nu_1 + nu_4 + ... + nu_k against 3/8 + 8 varpi + delta.
  const Rational outer = t.total() - t.nu[1] - t.nu[2];
  rep.conclusion_margin = lo + t.delta - outer;
  rep.conclusion = rep.conclusion_margin > Rational(0);
  rep.pair_bound = t.nu[1] + t.nu[2] > hi;

  Rational partial = t.nu[1];
  for (int l = 3; l <= t.k(); ++l) {
    const Rational before = partial;
    partial += t.nu[static_cast<std::size_t>(l - 1)];
    if (partial > hi) {
      rep.l = l;
      rep.l_valid = before < lo;
      rep.nu_l_bound = t.nu[static_cast<std::size_t>(l - 1)] > Rational(1, 4) - Rational(16) * t.varpi;
      break;
    }
  }

  if (!rep.varpi_ok) {
    rep.status = Lemma1Status::varpi_too_large;
  } else if (!rep.large_factor_bound || !rep.no_medium_subset) {
    rep.status = Lemma1Status::inapplicable;
  } else if (rep.conclusion && rep.pair_bound && rep.l && rep.l_valid && rep.nu_l_bound) {
    rep.status = Lemma1Status::holds;
  } else {
    rep.status = Lemma1Status::counterexample;
  }
  return rep;
}

std::vector<Rational> multiples_grid(std::int64_t denominator, const Rational& delta) {
  if (denominator < 1) throw DomainError("grid denominator must be >= 1");
  std::vector<Rational> v;
  const Rational top = Rational(1) + delta;
  for (std::int64_t m = 0; Rational(m, denominator) < top; ++m) v.emplace_back(m, denominator);
  return v;
}

std::vector<Rational> farey_grid(std::int64_t max_denominator, const Rational& delta) {
  if (max_denominator < 1) throw DomainError("grid denominator must be >= 1");
  std::vector<Rational> v;
  const Rational top = Rational(1) + delta;
  for (std::int64_t q = 1; q <= max_denominator; ++q) {
    for (std::int64_t p = 0; Rational(p, q) < top; ++p) {
      if (std::gcd(p, q) == 1) v.emplace_back(p, q);
    }
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Lemma1GridSummary lemma1_grid(int k, const std::vector<Rational>& values_in, std::int64_t x, const Rational& varpi,
                              int workers, bool collect_witnesses) {
  if (k < 4) throw DomainError("lemma1 grid needs k >= 4");
  require_varpi_admissible(varpi);
  const Rational delta = log2_over_logx_bound(x);
  std::vector<Rational> values = values_in;
  std::sort(values.begin(), values.end());
  const Rational one(1);
  const Rational top = one + delta;

  // Enumerate nonincreasing tuples, pruning on the running total.
  std::vector<std::vector<Rational>> tuples;
  std::vector<Rational> cur;
  std::function<void(std::size_t, const Rational&)> walk = [&](std::size_t max_idx, const Rational& sum) {
    const auto depth = static_cast<int>(cur.size());
    if (depth == k) {
      if (one <= sum && sum < top) tuples.push_back(cur);
      return;
    }
    const int left = k - depth;
    for (std::size_t i = max_idx + 1; i-- > 0;) {
      const Rational& v = values[i];
      if (!(sum + v < top)) continue;
      if (sum + v * Rational(left) < one) break;  // smaller values cannot reach 1 either
      cur.push_back(v);
      walk(i, sum + v);
      cur.pop_back();
    }
  };
  if (!values.empty()) walk(values.size() - 1, Rational(0));

  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1,
                                                std::max<std::size_t>(tuples.size(), 1));
  std::vector<Lemma1GridSummary> parts(w);
  std::vector<std::exception_ptr> errors(w);
  auto slice = [&](std::size_t s) {
    try {
      Lemma1GridSummary& part = parts[s];
      bool have_margin = false;
      for (std::size_t i = tuples.size() * s / w; i < tuples.size() * (s + 1) / w; ++i) {
        ExponentTuple t(tuples[i], x, varpi, delta);
        ++part.tuples;
        const CaseLabel label = classify(t);
        switch (label.variant) {
          case CaseVariant::A: ++part.case_a; break;
          case CaseVariant::B: ++part.case_b; break;
          case CaseVariant::C: ++part.case_c; break;
        }
        if (collect_witnesses && label.variant == CaseVariant::C) part.witnesses.emplace_back(t, label);
        const Lemma1Report rep = lemma1_check(t);
        if (rep.status == Lemma1Status::inapplicable) continue;
        ++part.applicable;
        if (!have_margin || rep.conclusion_margin < part.min_margin) {
          part.min_margin = rep.conclusion_margin;
          have_margin = true;
        }
        if (rep.status != Lemma1Status::holds) {
          ++part.counterexamples;
          part.failures.push_back(t);
        }
      }
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (w == 1) {
    slice(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t s = 0; s < w; ++s) threads.emplace_back(slice, s);
    for (auto& th : threads) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Lemma1GridSummary total;
  total.k = k;
  bool have_margin = false;
  for (auto& p : parts) {
    total.tuples += p.tuples;
    total.applicable += p.applicable;
    total.counterexamples += p.counterexamples;
    total.case_a += p.case_a;
    total.case_b += p.case_b;
    total.case_c += p.case_c;
    if (p.applicable > 0 && (!have_margin || p.min_margin < total.min_margin)) {
      total.min_margin = p.min_margin;
      have_margin = true;
    }
    for (auto& f : p.failures) total.failures.push_back(std::move(f));
    for (auto& wt : p.witnesses) total.witnesses.push_back(std::move(wt));
  }
  return total;
}

DispersionRanges dispersion_ranges(const ExponentTuple& t, const std::vector<int>& witness, const Rational& theta,
                                   const Rational& varpi, const Rational& eps) {
  std::uint32_t mask = 0;
  for (int i : witness) {
    if (i < 1 || i > t.k()) throw DomainError("witness index out of range");
    mask |= 1U << (i - 1);
  }
  DispersionRanges out;
  out.n_exponent = t.subset_sum(mask);
  out.m_exponent = t.total() - out.n_exponent;
  const Rational half = Rational(1, 2) + t.delta / Rational(2);
  if (!(medium_low(varpi) <= out.n_exponent && out.n_exponent < half)) {
    throw DomainError("witness sum " + out.n_exponent.str() + " outside [3/8 + 8 varpi, 1/2 + delta/2)");
  }
  if (out.n_exponent < Rational(1, 2) - Rational(4) * varpi) {
    out.branch = 1;
    out.r_low = out.n_exponent - varpi - eps;
    out.r_high = out.n_exponent - eps;
  } else {
    out.branch = 2;
    out.r_low = out.n_exponent - Rational(4) * varpi;
    out.r_high = out.n_exponent - Rational(3) * varpi;
  }
  out.qr_low = Rational(1, 2) - eps;
  out.qr_high = theta;
  out.q_low = out.qr_low - out.r_high;
  out.q_high = out.qr_high - out.r_low;
  return out;
}

bool polymath_feasible(const Rational& theta, const Rational& varpi) {
  return Rational(43) * (theta - Rational(1, 2)) + Rational(27) * varpi < Rational(1);
}

bool theta_varpi_relation(const Rational& theta, const Rational& varpi) {
  return theta == Rational(1, 2) + Rational(2) * varpi;
}

std::vector<Rational> parse_rational_list(const std::string& csv) {
  std::vector<Rational> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(' ') == std::string::npos) continue;
    out.push_back(Rational::parse(item));
  }
  return out;
}

std::string join(const std::vector<Rational>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + v[i].str();
  return s;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

}  // namespace plab
