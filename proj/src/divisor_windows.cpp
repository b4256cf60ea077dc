#include "plab/divisor_windows.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "plab/arith.hpp"
#include "plab/errors.hpp"

namespace plab {
namespace {

std::vector<std::int64_t> divisors_of(const PrimeFactorization& f) {
  std::vector<std::int64_t> divs{1};
  for (const auto& [p, e] : f.factors) {
    const std::size_t base = divs.size();
    std::int64_t pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) divs.push_back(divs[j] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

bool inside(std::int64_t r, const PowerBound& R, const PowerBound& upper) {
  return compare(r, R) > 0 && compare(r, upper) < 0;
}

std::int64_t floor_int(const PowerBound& b) { return to_int64(b.floor()); }

}  // namespace

std::string to_string(WindowBranch b) { return b == WindowBranch::low ? "low" : "high"; }

TriFactorization tri_factorize(std::int64_t d, const PowerBound& z0, const PowerBound& z1) {
  if (d < 1) throw DomainError("tri_factorize needs d >= 1");
  if (compare(z0, z1) >= 0) throw DomainError("tri_factorize needs z0 < z1");
  const PrimeFactorization f = factorize(d);
  TriFactorization tf;
  tf.d = d;
  tf.z0_floor = floor_int(z0);
  tf.z1_floor = floor_int(z1);
  for (const auto& [p, e] : f.factors) {
    if (e > 1) throw DomainError(std::to_string(d) + " is not square-free");
    if (p <= tf.z0_floor) {
      tf.d0 *= p;
    } else if (p <= tf.z1_floor) {
      tf.d1 *= p;
      tf.d1_primes.push_back(p);
    } else {
      tf.d2 *= p;
    }
  }
  return tf;
}

std::optional<std::int64_t> brute_force_window(std::int64_t d, std::int64_t z0_floor, const PowerBound& R,
                                               const PowerBound& ratio) {
  const PrimeFactorization f = factorize(d);
  const std::int64_t tiny = smooth_part(f, z0_floor);
  const PowerBound upper = ratio * R;
  for (std::int64_t r : divisors_of(f)) {
    // (d/r, P(z0)) = 1 for square-free d means every tiny prime divides r.
    if (std::gcd(d / r, tiny) != 1) continue;
    if (inside(r, R, upper)) return r;
  }
  return std::nullopt;
}

std::int64_t find_divisor_in_window(const TriFactorization& tf, const WindowQuery& q) {
  const PowerBound upper = q.ratio * q.R;
  auto fail = [&](const std::string& why) -> std::int64_t {
    throw SearchFailure("no divisor of " + std::to_string(tf.d) + " in (" + q.R.str() + ", " + upper.str() +
                            "): " + why,
                        brute_force_window(tf.d, tf.z0_floor, q.R, q.ratio));
  };
  std::int64_t r = q.branch == WindowBranch::low ? tf.d0 : tf.d0 * tf.d2;
  if (compare(r, q.R) <= 0) {
    for (std::int64_t p : tf.d1_primes) {
      r *= p;
      if (compare(r, q.R) > 0) break;
    }
    if (compare(r, q.R) <= 0) return fail("d0 d1 does not exceed R");
  }
  if (compare(r, upper) >= 0) return fail("candidate " + std::to_string(r) + " overshoots the window");
  return r;
}

void Lemma2Params::validate() const {
  if (x < 2) throw DomainError("lemma 2 needs x >= 2");
  if (!(Rational(0) < varpi && varpi < theta && theta < Rational(1))) throw DomainError("lemma 2 needs 0 < varpi < theta < 1");
  if (eps <= Rational(0)) throw DomainError("lemma 2 needs eps > 0");
  if (compare(z0, z1()) >= 0) throw DomainError("lemma 2 needs z0 < x^varpi");
}

double reference_z0(double x) { return std::exp(std::pow(std::log(x), 0.25)); }

Lemma2Hypotheses lemma2_hypotheses(std::int64_t d, const Lemma2Params& p) {
  Lemma2Hypotheses h;
  const PrimeFactorization f = factorize(d);
  h.squarefree = f.radical() == d;
  h.size_range = compare(d, PowerBound::power(p.x, Rational(1, 2) - p.eps)) > 0 &&
                 compare(d, PowerBound::power(p.x, p.theta)) < 0;
  const std::int64_t tiny = smooth_part(f, floor_int(p.z0));
  h.tiny_part = compare(tiny, PowerBound::power(p.x, p.varpi)) < 0;
  const std::int64_t medium = smooth_part(f, floor_int(p.z1()));
  h.smooth_part = compare(medium, PowerBound::power(p.x, Rational(1, 8) - Rational(4) * p.varpi)) > 0;
  h.theta_relation = p.theta == Rational(1, 2) + Rational(2) * p.varpi;
  return h;
}

std::optional<WindowBranch> branch_for(const Rational& e, const Rational& varpi) {
  if (varpi <= e && e <= Rational(44) * varpi) return WindowBranch::low;
  const Rational lo = Rational(3, 8) + Rational(6) * varpi;
  const Rational hi = Rational(1, 2) - Rational(3) * varpi;
  if (lo <= e && e <= hi) return WindowBranch::high;
  return std::nullopt;
}

std::vector<Rational> default_r_grid(const Rational& varpi) {
  std::vector<Rational> grid;
  auto spread = [&](const Rational& lo, const Rational& hi) {
    for (int j = 0; j < 4; ++j) grid.push_back(lo + (hi - lo) * Rational(j, 3));
  };
  spread(varpi, Rational(44) * varpi);
  spread(Rational(3, 8) + Rational(6) * varpi, Rational(1, 2) - Rational(3) * varpi);
  return grid;
}

Lemma2Summary lemma2_verify_range(const Lemma2Params& p, const std::vector<Rational>& r_grid,
                                  const Lemma2Options& opt) {
  p.validate();
  const std::int64_t d_lo = PowerBound::power(p.x, Rational(1, 2) - p.eps).min_above();
  const std::int64_t d_hi = PowerBound::power(p.x, p.theta).max_below();
  const PowerBound ratio = p.ratio();
  const PowerBound d0_cap = PowerBound::power(p.x, p.varpi);
  const PowerBound d2_cap = PowerBound::power(p.x, Rational(3, 8) + Rational(6) * p.varpi);

  struct Point {
    Rational e;
    WindowBranch branch;
    PowerBound R;
  };
  std::vector<Point> points;
  for (const auto& e : r_grid) {
    if (auto b = branch_for(e, p.varpi)) points.push_back({e, *b, PowerBound::power(p.x, e)});
  }

  std::vector<std::int64_t> ds;
  Lemma2Summary total;
  for (std::int64_t d = std::max<std::int64_t>(d_lo, 1); d <= d_hi; ++d) {
    const Lemma2Hypotheses h = lemma2_hypotheses(d, p);
    if (!h.squarefree || !h.size_range) continue;
    ++total.candidates;
    if (!h.tiny_part || (opt.enforce_smooth_part && !h.smooth_part)) continue;
    ds.push_back(d);
  }
  total.admissible = static_cast<std::int64_t>(ds.size());

  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opt.workers, 1)), 1,
                                                std::max<std::size_t>(ds.size(), 1));
  std::vector<Lemma2Summary> parts(w);
  std::vector<std::exception_ptr> errors(w);
  auto slice = [&](std::size_t s) {
    try {
      Lemma2Summary& part = parts[s];
      for (std::size_t i = ds.size() * s / w; i < ds.size() * (s + 1) / w; ++i) {
        const std::int64_t d = ds[i];
        const TriFactorization tf = tri_factorize(d, p.z0, p.z1());
        const bool bounds_ok = compare(tf.d0, d0_cap) < 0 && compare(tf.d2, d2_cap) < 0;
        for (const auto& pt : points) {
          Lemma2Row row{d, tf.d0, tf.d1, tf.d2, pt.e, pt.R.to_double(), std::nullopt, ratio.to_double(),
                        false, false, pt.branch};
          ++part.instances;
          if (!bounds_ok) ++part.bound_violations;
          const std::optional<std::int64_t> oracle = brute_force_window(d, tf.z0_floor, pt.R, ratio);
          row.oracle_found = oracle.has_value();
          try {
            row.r = find_divisor_in_window(tf, {pt.R, ratio, pt.branch});
            ++part.constructed;
          } catch (const SearchFailure&) {
            ++part.failures;
          }
          if (row.oracle_found) ++part.oracle_found;
          row.oracle_agrees = row.r.has_value() == row.oracle_found;
          if (!row.oracle_agrees) ++part.disagreements;
          if (opt.keep_rows) part.rows.push_back(row);
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
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& part : parts) {
    total.instances += part.instances;
    total.constructed += part.constructed;
    total.oracle_found += part.oracle_found;
    total.disagreements += part.disagreements;
    total.failures += part.failures;
    total.bound_violations += part.bound_violations;
    for (auto& r : part.rows) total.rows.push_back(std::move(r));
  }
  return total;
}

}  // namespace plab
