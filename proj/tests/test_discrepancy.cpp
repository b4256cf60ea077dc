#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "plab/discrepancy.hpp"
#include "plab/errors.hpp"

using namespace plab;

namespace {

std::function<std::int64_t(std::int64_t)> tau_fn(std::int64_t limit, int k) {
  auto t = std::make_shared<std::vector<std::int64_t>>(oracle::tau_table(limit, k));
  return [t](std::int64_t n) { return (*t)[static_cast<std::size_t>(n)]; };
}

mpq_class oracle_sum(const std::function<std::int64_t(std::int64_t)>& f, std::int64_t x,
                     const std::vector<std::int64_t>& moduli, std::int64_t a) {
  mpq_class s = 0;
  for (std::int64_t d : moduli) s += abs(oracle::delta(f, x, d, a));
  return s;
}

}  // namespace

TEST_CASE("delta examples") {
  const auto t2 = sieve_tau_k(100, 2);
  const auto v = delta(t2, 10, 3, 1);
  CHECK(v.numerator == 2);
  CHECK(v.denominator == 2);
  CHECK(v.value() == 1);
  for (std::int64_t a : {1, 5, -3}) CHECK(delta(t2, 100, 1, a).numerator == 0);

  const auto t4 = sieve_tau_k(100, 4);
  CHECK(delta(t4, 100, 7, 3).value() == oracle::delta(tau_fn(100, 4), 100, 7, 3));
}

TEST_CASE("delta preconditions") {
  const auto t2 = sieve_tau_k(100, 2);
  CHECK_THROWS_AS(delta(t2, 100, 6, 4), DomainError);
  CHECK_THROWS_AS(delta(t2, 101, 7, 1), CapacityError);
  CHECK_THROWS_AS(delta(t2, 100, 0, 1), DomainError);
}

TEST_CASE("residue sums vanish and delta matches the double loop") {
  for (int k = 2; k <= 5; ++k) {
    const auto t = sieve_tau_k(2000, k);
    const auto f = tau_fn(2000, k);
    for (std::int64_t x : {1, 17, 360, 1001, 2000}) {
      for (std::int64_t d = 1; d <= 50; ++d) {
        std::int64_t total = 0;
        for (std::int64_t a = 0; a < d; ++a) {
          if (std::gcd(a, d) != 1) continue;
          const auto v = delta(t, x, d, a);
          total += v.numerator;
          REQUIRE(v.denominator == oracle::phi(d));
          if (k <= 3) REQUIRE(v.numerator == oracle::delta_numerator(f, x, d, a));
        }
        REQUIRE(total == 0);
      }
    }
  }
}

TEST_CASE("delta on a view treats values outside it as zero") {
  std::vector<std::int64_t> vals{5, 0, 2, 7};  // f(10..13)
  const FunctionView f{10, vals};
  auto g = [&](std::int64_t n) { return f(n); };
  for (std::int64_t d : {2, 3, 5, 6}) {
    for (std::int64_t a = 1; a < d; ++a) {
      if (std::gcd(a, d) != 1) continue;
      CHECK(delta(f, 20, d, a).value() == oracle::delta(g, 20, d, a));
    }
  }
}

TEST_CASE("admissible moduli examples") {
  const auto f = ModulusFilter::standard(Rational::parse("0.55"), Rational::parse("0.3"), 1);
  CHECK(admissible_moduli(20, f) == std::vector<std::int64_t>{2, 3, 5});

  auto tiny = ModulusFilter::standard(Rational(1, 10), Rational(0), 1);
  CHECK(admissible_moduli(20, tiny).empty());  // 20^(1/10) < 2

  auto even = ModulusFilter::standard(Rational(9, 10), Rational(0), 10);
  even.smooth_exponent = Rational(-1);
  even.squarefree_only = false;
  const auto ds = admissible_moduli(100, even);
  CHECK_FALSE(ds.empty());
  for (std::int64_t d : ds) CHECK(std::gcd(d, std::int64_t{10}) == 1);

  auto low = ModulusFilter::standard(Rational(1, 2), Rational(1, 20), 1);
  low.lower_exponent = Rational(1, 4);
  for (std::int64_t d : admissible_moduli(10'000, low)) CHECK(d > 10);
}

TEST_CASE("filter is checked") {
  ModulusFilter f;
  f.theta = Rational(3, 2);
  CHECK_THROWS_AS(f.validate(), DomainError);
  f.theta = Rational(1, 2);
  f.a = 0;
  CHECK_THROWS_AS(f.validate(), DomainError);
}

TEST_CASE("stricter smooth threshold gives a subset") {
  const std::int64_t x = 100'000;
  std::vector<std::int64_t> prev;
  for (const Rational e : {Rational(-1), Rational(0), Rational(1, 20), Rational(1, 10), Rational(1, 8), Rational(1, 4)}) {
    auto f = ModulusFilter::standard(Rational(1, 2), Rational(1, 5), 1);
    f.smooth_exponent = e;
    const auto cur = admissible_moduli(x, f);
    if (!prev.empty()) CHECK(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
    prev = cur;
  }
}

TEST_CASE("theorem 1 sum against the oracle") {
  const auto f = ModulusFilter::standard(Rational::parse("0.55"), Rational::parse("0.3"), 1);
  const auto s = sum_theorem1(20, 4, f);
  CHECK(s.modulus_count == 3);
  CHECK(s.sum == oracle_sum(tau_fn(20, 4), 20, {2, 3, 5}, 1));

  auto none = ModulusFilter::standard(Rational(1, 10), Rational(0), 1);
  CHECK(sum_theorem1(20, 4, none).sum == 0);

  // x = 10^4: moduli d < 100, square-free, smooth condition vacuous (exponent < 0)
  const auto desk = ModulusFilter::standard(Rational(1, 2), Rational(1, 20), 1);
  std::vector<std::int64_t> ds;
  for (std::int64_t d = 2; d < 100; ++d) {
    if (oracle::mu(d) != 0) ds.push_back(d);
  }
  CHECK(admissible_moduli(10'000, desk) == ds);
  CHECK(sum_theorem1(10'000, 4, desk).sum == oracle_sum(tau_fn(10'000, 4), 10'000, ds, 1));
}

TEST_CASE("bv sum against the oracle") {
  const auto f2 = tau_fn(10, 2);
  CHECK(sum_bv(10, 2, Rational(34, 100)).sum == abs(oracle::delta(f2, 10, 2, 1)));
  CHECK(sum_bv(10, 2, Rational(1, 10)).sum == 0);

  const auto f3 = tau_fn(1000, 3);
  mpq_class expect = 0;
  for (std::int64_t d = 2; d <= 15; ++d) {  // 1000^0.4 = 15.85
    mpq_class best = 0;
    for (std::int64_t a = 1; a < d; ++a) {
      if (std::gcd(a, d) == 1) best = std::max<mpq_class>(best, abs(oracle::delta(f3, 1000, d, a)));
    }
    expect += best;
  }
  const auto s = sum_bv(1000, 3, Rational(2, 5));
  CHECK(s.modulus_count == 14);
  CHECK(s.sum == expect);
}

TEST_CASE("sums do not depend on the worker count") {
  const auto t = sieve_tau_k(30'000, 4);
  const auto f = ModulusFilter::standard(Rational(1, 2), Rational(1, 20), 1);
  const auto one = sum_theorem1(t, 30'000, f, 1);
  const auto bv1 = sum_bv(t, 30'000, Rational(1, 2), 1);
  for (int w : {2, 3, 8, 64}) {
    CHECK(sum_theorem1(t, 30'000, f, w).sum == one.sum);
    CHECK(sum_bv(t, 30'000, Rational(1, 2), w).sum == bv1.sum);
  }
}

TEST_CASE("sw surrogate examples") {
  // n in [10, 20) with n = 1 mod 3: 10, 13, 16, 19; seven of the ten are prime to 3.
  CHECK(sw_surrogate({10, 20}, 1, 3, 1) == Rational(1, 2));
  CHECK(Rational(4) - Rational(7, 2) == Rational(1, 2));
  CHECK(sw_surrogate({10, 20}, 1, 1, 0) == Rational(0));
  const auto v = sw_surrogate({100, 200}, 6, 7, 3);
  CHECK(mpq_class(v.num(), v.den()) == oracle::sw(100, 200, 6, 7, 3));
  CHECK(abs(v) <= Rational(2 * 4));
  CHECK_THROWS_AS(sw_surrogate({10, 20}, 1, 6, 4), DomainError);
}

TEST_CASE("sw surrogate matches enumeration on random boxes") {
  std::mt19937_64 rng(7);
  auto u = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  for (int i = 0; i < 300; ++i) {
    const std::int64_t lo = u(1, 3000);
    const std::int64_t hi = lo + u(0, 800);
    const std::int64_t q = u(1, 2310);
    const std::int64_t r = u(1, 60);
    std::int64_t a = u(0, r - 1);
    while (std::gcd(a, r) != 1) a = u(0, r - 1);
    const auto v = sw_surrogate({lo, hi}, q, r, a);
    REQUIRE(mpq_class(v.num(), v.den()) == oracle::sw(lo, hi, q, r, a));
    const std::int64_t bound = std::int64_t{2} << oracle::prime_factors(q).size();
    REQUIRE(abs(v) <= Rational(bound));
  }
}

TEST_CASE("envelopes") {
  const double e = std::exp(1.0);
  CHECK(envelope_eval({EnvelopeForm::thm1}, e) == doctest::Approx(1.0).epsilon(1e-12));
  BoundEnvelope lp{EnvelopeForm::logpower, 2.0};
  CHECK(envelope_eval(lp, e * e) == doctest::Approx(e * e / 4).epsilon(1e-12));
  const double x = 1e6;
  CHECK(envelope_eval({EnvelopeForm::thm2}, x) ==
        doctest::Approx(x * std::exp(-std::pow(std::log(x), 2.0 / 3.0))).epsilon(1e-12));
  BoundEnvelope sw{EnvelopeForm::sw, 2.0, 0.1};
  CHECK(envelope_eval(sw, 1e4, 500.0) == doctest::Approx(500.0 * std::pow(1e4, -0.1)).epsilon(1e-12));
  CHECK(envelope_form_from_string(to_string(EnvelopeForm::logpower)) == EnvelopeForm::logpower);
}

TEST_CASE("theta_k table") {
  CHECK(theta_k(2) == Rational(2, 3));
  CHECK(theta_k(3) == Rational(21, 41));
  CHECK(theta_k(4) == Rational(1, 2));
  CHECK(theta_k(5) == Rational(9, 20));
  CHECK(theta_k(6) == Rational(5, 12));
  CHECK(theta_k(7) == Rational(8, 21));
  CHECK(theta_k(9) == Rational(8, 27));
  CHECK_THROWS_AS(theta_k(1), DomainError);
}
