#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plab/power.hpp"

namespace plab {

inline constexpr std::int64_t kDefaultSieveCap = 1'000'000'000;

enum class FunctionKind : std::uint32_t { tau = 0, mu = 1, phi = 2 };

// Read-only window of an integer-valued function: value(n) = values[n - first]
// on [first, first + size), zero elsewhere.
struct FunctionView {
  std::int64_t first = 1;
  std::span<const std::int64_t> values;

  std::int64_t last() const noexcept { return first + static_cast<std::int64_t>(values.size()) - 1; }
  std::int64_t operator()(std::int64_t n) const noexcept {
    return (n < first || n > last()) ? 0 : values[static_cast<std::size_t>(n - first)];
  }
};

// Dense table of tau_k, mu or phi on 1..limit. Immutable once built.
class ArithTable {
 public:
  ArithTable(FunctionKind kind, int k, std::vector<std::int64_t> values);

  FunctionKind kind() const noexcept { return kind_; }
  int k() const noexcept { return k_; }
  std::int64_t limit() const noexcept { return static_cast<std::int64_t>(values_.size()); }
  std::int64_t operator[](std::int64_t n) const { return values_.at(static_cast<std::size_t>(n - 1)); }
  std::span<const std::int64_t> values() const noexcept { return values_; }
  FunctionView view() const noexcept { return {1, values_}; }
  std::string name() const;

  friend bool operator==(const ArithTable&, const ArithTable&) = default;

 private:
  FunctionKind kind_;
  int k_;
  std::vector<std::int64_t> values_;  // values_[n - 1]
};

struct PrimeFactorization {
  std::int64_t value = 1;
  std::vector<std::pair<std::int64_t, int>> factors;  // ascending primes

  std::vector<std::int64_t> primes() const;
  std::int64_t radical() const;
  int omega() const noexcept { return static_cast<int>(factors.size()); }
};

std::vector<std::int64_t> sieve_primes(std::int64_t limit, std::int64_t cap = kDefaultSieveCap);

ArithTable sieve_tau_k(std::int64_t limit, int k, std::int64_t cap = kDefaultSieveCap);
ArithTable sieve_mu(std::int64_t limit, std::int64_t cap = kDefaultSieveCap);
ArithTable sieve_phi(std::int64_t limit, std::int64_t cap = kDefaultSieveCap);

// Trial division; fine for the moduli sizes handled here.
PrimeFactorization factorize(std::int64_t n);

// Smallest-prime-factor table for repeated factorization of n <= limit.
class Factorizer {
 public:
  explicit Factorizer(std::int64_t limit);
  std::int64_t limit() const noexcept { return static_cast<std::int64_t>(spf_.size()) - 1; }
  // Falls back to trial division above limit.
  PrimeFactorization factorize(std::int64_t n) const;

 private:
  std::vector<std::uint32_t> spf_;
};

// Product of the distinct primes p <= y dividing n, i.e. gcd(n, P(y)).
std::int64_t smooth_part(std::int64_t n, std::int64_t y_floor);
std::int64_t smooth_part(std::int64_t n, const PowerBound& y);
std::int64_t smooth_part(const PrimeFactorization& f, std::int64_t y_floor);

bool is_squarefree(std::int64_t n);

std::int64_t euler_phi(const PrimeFactorization& f);
std::int64_t gcd(std::int64_t a, std::int64_t b);

// Binary table cache, little-endian:
//   "PLAB" | u32 version (1) | u32 kind tag | u64 limit | limit x i64 values
// kind tag: tau_k -> k (1..0xFFFF), mu -> 0x10000, phi -> 0x10001.
void save_table(const ArithTable& table, const std::filesystem::path& path);
ArithTable load_table(const std::filesystem::path& path);

}  // namespace plab
