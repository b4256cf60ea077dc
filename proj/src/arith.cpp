#include "plab/arith.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include "plab/errors.hpp"

namespace plab {
namespace {

constexpr std::int64_t kSegment = 1 << 18;
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kMuTag = 0x10000;
constexpr std::uint32_t kPhiTag = 0x10001;

void check_limit(std::int64_t limit, std::int64_t cap) {
  if (limit < 1) throw DomainError("sieve limit must be >= 1");
  if (limit > cap) {
    throw CapacityError("sieve limit " + std::to_string(limit) + " exceeds cap " + std::to_string(cap));
  }
}

std::int64_t isqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("arithmetic table value overflows int64");
  return r;
}

// Value of a multiplicative function at p^e.
using PrimePowerFn = std::function<std::int64_t(std::int64_t p, int e)>;

// Segmented multiplicative sieve: in each segment every n is stripped of its
// prime factors below sqrt(limit); whatever remains above 1 is a single large prime.
std::vector<std::int64_t> multiplicative_sieve(std::int64_t limit, const PrimePowerFn& at_prime_power) {
  const std::vector<std::int64_t> base = sieve_primes(std::max<std::int64_t>(isqrt(limit), 1));
  std::vector<std::int64_t> values(static_cast<std::size_t>(limit));
  std::vector<std::int64_t> rest;
  for (std::int64_t lo = 1; lo <= limit; lo += kSegment) {
    const std::int64_t hi = std::min(limit + 1, lo + kSegment);
    const auto len = static_cast<std::size_t>(hi - lo);
    rest.resize(len);
    std::iota(rest.begin(), rest.end(), lo);
    std::int64_t* val = values.data() + (lo - 1);
    std::fill(val, val + len, 1);
    for (std::int64_t p : base) {
      if (p * p >= hi) break;
      for (std::int64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
        const auto i = static_cast<std::size_t>(m - lo);
        int e = 0;
        while (rest[i] % p == 0) {
          rest[i] /= p;
          ++e;
        }
        val[i] = checked_mul(val[i], at_prime_power(p, e));
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (rest[i] > 1) val[i] = checked_mul(val[i], at_prime_power(rest[i], 1));
    }
  }
  return values;
}

// C(e + k - 1, k - 1), the number of ordered k-factorizations of p^e.
std::int64_t tau_k_prime_power(int e, int k) {
  __int128 r = 1;
  for (int i = 1; i <= e; ++i) {
    r = r * (k - 1 + i) / i;
    if (r > std::numeric_limits<std::int64_t>::max()) throw OverflowError("tau_k(p^e) overflows int64");
  }
  return static_cast<std::int64_t>(r);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b.data(), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b.data(), 8);
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), bytes);
  if (!is) throw DomainError("truncated table file");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

ArithTable::ArithTable(FunctionKind kind, int k, std::vector<std::int64_t> values)
    : kind_(kind), k_(kind == FunctionKind::tau ? k : 0), values_(std::move(values)) {
  if (values_.empty()) throw DomainError("arithmetic table must cover at least n = 1");
}

std::string ArithTable::name() const {
  switch (kind_) {
    case FunctionKind::tau: return "tau_" + std::to_string(k_);
    case FunctionKind::mu: return "mu";
    case FunctionKind::phi: return "phi";
  }
  return "?";
}

std::vector<std::int64_t> PrimeFactorization::primes() const {
  std::vector<std::int64_t> out;
  out.reserve(factors.size());
  for (const auto& [p, e] : factors) out.push_back(p);
  return out;
}

std::int64_t PrimeFactorization::radical() const {
  std::int64_t r = 1;
  for (const auto& [p, e] : factors) r *= p;
  return r;
}

std::vector<std::int64_t> sieve_primes(std::int64_t limit, std::int64_t cap) {
  check_limit(limit, cap);
  std::vector<std::int64_t> primes;
  if (limit < 2) return primes;
  const std::int64_t root = isqrt(limit);
  std::vector<char> small(static_cast<std::size_t>(root + 1), 1);
  std::vector<std::int64_t> base;
  for (std::int64_t i = 2; i <= root; ++i) {
    if (!small[static_cast<std::size_t>(i)]) continue;
    base.push_back(i);
    for (std::int64_t j = i * i; j <= root; j += i) small[static_cast<std::size_t>(j)] = 0;
  }
  std::vector<char> seg;
  for (std::int64_t lo = 2; lo <= limit; lo += kSegment) {
    const std::int64_t hi = std::min(limit + 1, lo + kSegment);
    seg.assign(static_cast<std::size_t>(hi - lo), 1);
    for (std::int64_t p : base) {
      if (p * p >= hi) break;
      for (std::int64_t m = std::max(p * p, (lo + p - 1) / p * p); m < hi; m += p) {
        seg[static_cast<std::size_t>(m - lo)] = 0;
      }
    }
    for (std::int64_t n = lo; n < hi; ++n) {
      if (seg[static_cast<std::size_t>(n - lo)]) primes.push_back(n);
    }
  }
  return primes;
}

ArithTable sieve_tau_k(std::int64_t limit, int k, std::int64_t cap) {
  if (k < 1) throw DomainError("tau_k needs k >= 1");
  check_limit(limit, cap);
  if (k == 1) return ArithTable(FunctionKind::tau, 1, std::vector<std::int64_t>(static_cast<std::size_t>(limit), 1));
  // tau_k(p^e) depends on e only; cache the first few.
  std::vector<std::int64_t> by_exponent;
  for (int e = 0; e < 64; ++e) {
    try {
      by_exponent.push_back(tau_k_prime_power(e, k));
    } catch (const OverflowError&) {
      break;
    }
  }
  auto at = [&](std::int64_t, int e) {
    if (static_cast<std::size_t>(e) >= by_exponent.size()) throw OverflowError("tau_k(p^e) overflows int64");
    return by_exponent[static_cast<std::size_t>(e)];
  };
  return ArithTable(FunctionKind::tau, k, multiplicative_sieve(limit, at));
}

ArithTable sieve_mu(std::int64_t limit, std::int64_t cap) {
  check_limit(limit, cap);
  return ArithTable(FunctionKind::mu, 0,
                    multiplicative_sieve(limit, [](std::int64_t, int e) -> std::int64_t { return e == 1 ? -1 : 0; }));
}

ArithTable sieve_phi(std::int64_t limit, std::int64_t cap) {
  check_limit(limit, cap);
  return ArithTable(FunctionKind::phi, 0, multiplicative_sieve(limit, [](std::int64_t p, int e) {
                      std::int64_t v = p - 1;
                      for (int i = 1; i < e; ++i) v = checked_mul(v, p);
                      return v;
                    }));
}

PrimeFactorization factorize(std::int64_t n) {
  if (n < 1) throw DomainError("factorize needs n >= 1");
  PrimeFactorization f;
  f.value = n;
  auto strip = [&](std::int64_t p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) f.factors.emplace_back(p, e);
  };
  strip(2);
  strip(3);
  for (std::int64_t p = 5; p <= n / p; p += 6) {
    strip(p);
    strip(p + 2);
  }
  if (n > 1) f.factors.emplace_back(n, 1);
  return f;
}

Factorizer::Factorizer(std::int64_t limit) {
  if (limit < 1) throw DomainError("factorizer limit must be >= 1");
  if (limit > std::numeric_limits<std::uint32_t>::max()) throw CapacityError("factorizer limit above 2^32");
  spf_.assign(static_cast<std::size_t>(limit + 1), 0);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (spf_[static_cast<std::size_t>(i)] != 0) continue;
    for (std::int64_t j = i; j <= limit; j += i) {
      if (spf_[static_cast<std::size_t>(j)] == 0) spf_[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(i);
    }
  }
}

PrimeFactorization Factorizer::factorize(std::int64_t n) const {
  if (n > limit()) return plab::factorize(n);
  if (n < 1) throw DomainError("factorize needs n >= 1");
  PrimeFactorization f;
  f.value = n;
  while (n > 1) {
    const std::int64_t p = spf_[static_cast<std::size_t>(n)];
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.factors.emplace_back(p, e);
  }
  return f;
}

std::int64_t smooth_part(const PrimeFactorization& f, std::int64_t y_floor) {
  std::int64_t s = 1;
  for (const auto& [p, e] : f.factors) {
    if (p > y_floor) break;
    s *= p;
  }
  return s;
}

std::int64_t smooth_part(std::int64_t n, std::int64_t y_floor) { return smooth_part(factorize(n), y_floor); }

std::int64_t smooth_part(std::int64_t n, const PowerBound& y) {
  const mpz_class f = y.floor();
  if (f >= n) return factorize(n).radical();
  return smooth_part(n, mpz_get_si(f.get_mpz_t()));
}

bool is_squarefree(std::int64_t n) {
  if (n < 1) throw DomainError("is_squarefree needs n >= 1");
  const PrimeFactorization f = factorize(n);
  return std::all_of(f.factors.begin(), f.factors.end(), [](const auto& pe) { return pe.second == 1; });
}

std::int64_t euler_phi(const PrimeFactorization& f) {
  std::int64_t r = 1;
  for (const auto& [p, e] : f.factors) {
    r *= p - 1;
    for (int i = 1; i < e; ++i) r *= p;
  }
  return r;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

void save_table(const ArithTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open " + path.string() + " for writing");
  os.write("PLAB", 4);
  put_u32(os, kFormatVersion);
  std::uint32_t tag = 0;
  switch (table.kind()) {
    case FunctionKind::tau: tag = static_cast<std::uint32_t>(table.k()); break;
    case FunctionKind::mu: tag = kMuTag; break;
    case FunctionKind::phi: tag = kPhiTag; break;
  }
  put_u32(os, tag);
  put_u64(os, static_cast<std::uint64_t>(table.limit()));
  for (std::int64_t v : table.values()) put_u64(os, static_cast<std::uint64_t>(v));
  if (!os) throw DomainError("failed writing " + path.string());
}

ArithTable load_table(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || std::string_view(magic.data(), 4) != "PLAB") throw DomainError("bad table magic in " + path.string());
  if (get_le(is, 4) != kFormatVersion) throw DomainError("unsupported table version in " + path.string());
  const auto tag = static_cast<std::uint32_t>(get_le(is, 4));
  const auto limit = get_le(is, 8);
  if (limit == 0 || limit > static_cast<std::uint64_t>(kDefaultSieveCap)) throw CapacityError("table limit out of range");
  std::vector<std::int64_t> values(limit);
  for (auto& v : values) v = static_cast<std::int64_t>(get_le(is, 8));
  if (tag == kMuTag) return ArithTable(FunctionKind::mu, 0, std::move(values));
  if (tag == kPhiTag) return ArithTable(FunctionKind::phi, 0, std::move(values));
  if (tag >= 1 && tag <= 0xFFFF) return ArithTable(FunctionKind::tau, static_cast<int>(tag), std::move(values));
  throw DomainError("unknown table kind tag " + std::to_string(tag));
}

}  // namespace plab
