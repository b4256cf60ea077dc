#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "plab/arith.hpp"
#include "plab/errors.hpp"

using namespace plab;

TEST_CASE("sieve_primes small limits") {
  CHECK(sieve_primes(1).empty());
  CHECK(sieve_primes(10) == std::vector<std::int64_t>{2, 3, 5, 7});
  CHECK(sieve_primes(2) == std::vector<std::int64_t>{2});
}

TEST_CASE("sieve_primes matches trial division up to 10^4") {
  const auto ps = sieve_primes(10'000);
  std::vector<std::int64_t> expect;
  for (std::int64_t n = 2; n <= 10'000; ++n) {
    if (oracle::is_prime(n)) expect.push_back(n);
  }
  CHECK(ps == expect);
}

TEST_CASE("prime count at 10^6 across segment boundaries") {
  const auto ps = sieve_primes(1'000'000);
  CHECK(ps.size() == 78498);
  // second route: phi(p) = p - 1 exactly at primes
  const auto phi = sieve_phi(1'000'000);
  std::int64_t count = 0;
  for (std::int64_t n = 2; n <= 1'000'000; ++n) count += phi[n] == n - 1;
  CHECK(count == 78498);
}

TEST_CASE("sieve caps raise capacity errors") {
  CHECK_THROWS_AS(sieve_primes(1000, 100), CapacityError);
  CHECK_THROWS_AS(sieve_tau_k(1000, 3, 999), CapacityError);
  CHECK_THROWS_AS(sieve_tau_k(0, 3), DomainError);
  CHECK_THROWS_AS(sieve_tau_k(10, 0), DomainError);
}

TEST_CASE("tau_k examples") {
  CHECK(sieve_tau_k(12, 2)[12] == 6);
  CHECK(sieve_tau_k(4, 3)[4] == 6);
  const auto one = sieve_tau_k(500, 1);
  for (std::int64_t n = 1; n <= 500; ++n) REQUIRE(one[n] == 1);
}

TEST_CASE("tau_k agrees with recursive enumeration and the divisor-sum identity") {
  for (int k = 2; k <= 6; ++k) {
    const auto t = sieve_tau_k(2000, k);
    const auto prev = sieve_tau_k(2000, k - 1);
    for (std::int64_t n = 1; n <= 2000; ++n) {
      REQUIRE(t[n] == oracle::tau_k(n, k));
      std::int64_t s = 0;
      for (std::int64_t d = 1; d <= n; ++d) {
        if (n % d == 0) s += prev[d];
      }
      REQUIRE(t[n] == s);
    }
  }
}

TEST_CASE("tau_k table invariants") {
  const auto t = sieve_tau_k(3000, 5);
  CHECK(t[1] == 1);
  for (std::int64_t p : sieve_primes(3000)) REQUIRE(t[p] == 5);
  for (std::int64_t n = 1; n <= 3000; ++n) REQUIRE(t[n] >= 1);
}

TEST_CASE("tau_k overflow is reported, not wrapped") {
  // tau_k(2^e) = C(e+k-1, k-1); huge k makes the entry at 2^20 exceed 2^63.
  CHECK_THROWS_AS(sieve_tau_k(1 << 20, 5000), OverflowError);
}

TEST_CASE("mu and phi examples and identities") {
  const auto mu = sieve_mu(10'000);
  const auto phi = sieve_phi(10'000);
  CHECK(mu[30] == -1);
  CHECK(mu[12] == 0);
  CHECK(mu[1] == 1);
  CHECK(phi[10] == 4);
  CHECK(phi[1] == 1);
  for (std::int64_t n = 1; n <= 10'000; ++n) {
    std::int64_t smu = 0, sphi = 0;
    for (std::int64_t d = 1; d * d <= n; ++d) {
      if (n % d) continue;
      smu += mu[d];
      sphi += phi[d];
      if (d * d != n) {
        smu += mu[n / d];
        sphi += phi[n / d];
      }
    }
    REQUIRE(smu == (n == 1 ? 1 : 0));
    REQUIRE(sphi == n);
    REQUIRE(is_squarefree(n) == (mu[n] != 0));
    REQUIRE(mu[n] == oracle::mu(n));
  }
  for (std::int64_t n = 1; n <= 300; ++n) REQUIRE(phi[n] == oracle::phi(n));
}

TEST_CASE("factorize") {
  CHECK(factorize(1).factors.empty());
  const auto f60 = factorize(60);
  CHECK(f60.factors == std::vector<std::pair<std::int64_t, int>>{{2, 2}, {3, 1}, {5, 1}});
  CHECK(f60.radical() == 30);
  CHECK(f60.omega() == 3);
  CHECK(factorize(10007).factors == std::vector<std::pair<std::int64_t, int>>{{10007, 1}});
  CHECK_THROWS_AS(factorize(0), DomainError);
}

TEST_CASE("Factorizer agrees with trial division") {
  Factorizer fz(50'000);
  for (std::int64_t n = 1; n <= 50'000; n += 7) {
    const auto a = fz.factorize(n);
    REQUIRE(a.factors == factorize(n).factors);
    std::int64_t prod = 1;
    std::int64_t last = 1;
    for (auto [p, e] : a.factors) {
      REQUIRE(p > last);
      REQUIRE(e >= 1);
      last = p;
      for (int i = 0; i < e; ++i) prod *= p;
    }
    REQUIRE(prod == n);
  }
  // beyond the table
  CHECK(fz.factorize(1'000'003 * 2).factors == factorize(2'000'006).factors);
}

TEST_CASE("smooth_part") {
  CHECK(smooth_part(60, 5) == 30);
  CHECK(smooth_part(60, 3) == 6);
  CHECK(smooth_part(7, 2) == 1);
  CHECK(smooth_part(60, PowerBound::power(100, Rational(1, 2))) == 30);  // y = 10
  CHECK(smooth_part(77, PowerBound::power(7, Rational(1))) == 7);        // p <= y is closed
  for (std::int64_t n = 1; n <= 3000; ++n) {
    for (std::int64_t y : {0, 1, 2, 3, 10, 50}) {
      const std::int64_t s = smooth_part(n, y);
      REQUIRE(n % s == 0);
      REQUIRE(is_squarefree(s));
      for (std::int64_t p : oracle::prime_factors(s)) REQUIRE(p <= y);
      if (is_squarefree(n)) {
        for (std::int64_t p : oracle::prime_factors(n / s)) REQUIRE(p > y);
      }
    }
  }
}

TEST_CASE("is_squarefree") {
  CHECK(is_squarefree(1));
  CHECK(is_squarefree(30));
  CHECK_FALSE(is_squarefree(12));
}

TEST_CASE("table cache round trip and format") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "plab_cache_test.bin";
  const auto t = sieve_tau_k(1000, 3);
  save_table(t, path);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 8 + 8 * 1000);
  const auto back = load_table(path);
  CHECK(back == t);
  const auto m = sieve_mu(100);
  save_table(m, path);
  CHECK(load_table(path) == m);
  std::filesystem::remove(path);
}
