#include "plab/boxes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "plab/arith.hpp"
#include "plab/errors.hpp"
#include "plab/power.hpp"

namespace plab {
namespace {

mpq_class to_mpq(const Rational& r) {
  mpq_class q(to_mpz(r.num()), to_mpz(r.den()));
  q.canonicalize();
  return q;
}

mpz_class ceil_of(const mpq_class& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

IntRange integer_box(const mpq_class& n, const mpq_class& rho) {
  const mpq_class top = n * (1 + rho);
  return {to_int64(ceil_of(n)), to_int64(ceil_of(top))};
}

std::int64_t mul_sat(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) return std::numeric_limits<std::int64_t>::max();
  return r;
}

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

}  // namespace

BoxTuple::BoxTuple(std::int64_t x, std::vector<mpq_class> lengths, mpq_class rho)
    : x_(x), lengths_(std::move(lengths)), rho_(std::move(rho)) {
  if (x_ < 1) throw DomainError("box tuple needs x >= 1");
  if (lengths_.empty()) throw DomainError("box tuple needs k >= 1");
  if (rho_ <= 0) throw DomainError("box tuple needs rho > 0");
  boxes_.reserve(lengths_.size());
  for (auto& n : lengths_) {
    n.canonicalize();
    if (n < 1) throw DomainError("box lengths must be >= 1");
    boxes_.push_back(integer_box(n, rho_));
  }
}

BoxTuple BoxTuple::from_lengths(std::int64_t x, const std::vector<Rational>& lengths, const Rational& rho) {
  std::vector<mpq_class> ls;
  ls.reserve(lengths.size());
  for (const auto& n : lengths) ls.push_back(to_mpq(n));
  return BoxTuple(x, std::move(ls), to_mpq(rho));
}

BoxTuple BoxTuple::from_exponents(std::int64_t x, const std::vector<Rational>& nu, const Rational& rho) {
  std::vector<Rational> ls;
  ls.reserve(nu.size());
  for (const auto& e : nu) {
    const PowerBound y = PowerBound::power(x, e);
    const std::int64_t f = to_int64(y.floor());
    // round half up: f + 1 when 2f + 1 <= 2y
    const PowerBound twice{Rational(2), x, e};
    const std::int64_t rounded = compare(2 * f + 1, twice) <= 0 ? f + 1 : f;
    ls.emplace_back(std::max<std::int64_t>(rounded, 1));
  }
  return from_lengths(x, ls, rho);
}

bool BoxTuple::is_ordered() const {
  for (std::size_t i = 1; i < lengths_.size(); ++i) {
    if (lengths_[i] > lengths_[i - 1]) return false;
  }
  return true;
}

bool BoxTuple::product_in_window() const {
  mpq_class prod = 1;
  for (const auto& n : lengths_) prod *= n;
  return prod >= x_ && prod < 2 * x_;
}

std::int64_t BoxTuple::lattice_points() const {
  std::int64_t p = 1;
  for (const auto& b : boxes_) p = mul_sat(p, b.size());
  return p;
}

std::string BoxTuple::describe() const {
  std::ostringstream os;
  os << "rho=" << rho_.get_str() << " N=(";
  for (std::size_t i = 0; i < lengths_.size(); ++i) os << (i ? "," : "") << lengths_[i].get_str();
  os << ")";
  return os.str();
}

std::int64_t GammaTable::mass() const {
  std::int64_t m = 0;
  for (std::int64_t v : values) m += v;
  return m;
}

std::int64_t gamma_eval(const BoxTuple& bt, std::int64_t n) {
  if (n < 1) return 0;
  const std::vector<std::int64_t> divs = divisors_of(factorize(n));
  const int k = bt.k();
  std::function<std::int64_t(int, std::int64_t)> count = [&](int i, std::int64_t rest) -> std::int64_t {
    const IntRange& b = bt.box(i);
    if (i == k - 1) return (rest >= b.lo && rest < b.hi) ? 1 : 0;
    std::int64_t c = 0;
    for (auto it = std::lower_bound(divs.begin(), divs.end(), b.lo); it != divs.end() && *it < b.hi; ++it) {
      if (rest % *it == 0) c += count(i + 1, rest / *it);
    }
    return c;
  };
  return count(0, n);
}

GammaTable gamma_sieve(const BoxTuple& bt, std::int64_t work_cap) {
  GammaTable table;
  for (const auto& b : bt.boxes()) {
    if (b.empty()) {
      table.first = bt.boxes().front().lo;
      return table;
    }
  }
  if (bt.lattice_points() > work_cap) {
    throw CapacityError("gamma lattice of " + bt.describe() + " exceeds work cap " + std::to_string(work_cap));
  }
  std::int64_t lo = 1;
  std::int64_t hi = 1;  // inclusive support bounds of the partial convolution
  std::vector<std::int64_t> cur{1};
  std::int64_t work = 0;
  for (const auto& b : bt.boxes()) {
    const std::int64_t nlo = mul_sat(lo, b.lo);
    const std::int64_t nhi = mul_sat(hi, b.hi - 1);
    if (nhi == std::numeric_limits<std::int64_t>::max() || nhi - nlo + 1 > work_cap) {
      throw CapacityError("gamma support of " + bt.describe() + " exceeds work cap");
    }
    std::vector<std::int64_t> next(static_cast<std::size_t>(nhi - nlo + 1), 0);
    for (std::int64_t n = lo; n <= hi; ++n) {
      const std::int64_t c = cur[static_cast<std::size_t>(n - lo)];
      if (c == 0) continue;
      for (std::int64_t m = b.lo; m < b.hi; ++m) next[static_cast<std::size_t>(n * m - nlo)] += c;
      work += b.size();
    }
    if (work > work_cap) throw CapacityError("gamma sieve of " + bt.describe() + " exceeds work cap");
    cur = std::move(next);
    lo = nlo;
    hi = nhi;
  }
  table.first = lo;
  table.values = std::move(cur);
  return table;
}

std::vector<BoxTuple> box_partition(std::int64_t x, const Rational& rho, int k, std::int64_t tuple_cap) {
  if (x < 1) throw DomainError("box_partition needs x >= 1");
  if (rho <= Rational(0)) throw DomainError("box_partition needs rho > 0");
  if (k < 1) throw DomainError("box_partition needs k >= 1");
  const mpq_class ratio = 1 + to_mpq(rho);
  const std::int64_t top = 2 * x - 1;

  struct Box {
    mpq_class start;
    IntRange ints;
  };
  std::vector<Box> boxes;  // nonempty boxes meeting [1, 2x)
  mpq_class start = 1;
  while (true) {
    const IntRange ints = integer_box(start, to_mpq(rho));
    if (ints.lo > top) break;
    if (!ints.empty()) boxes.push_back({start, ints});
    start *= ratio;
  }

  std::vector<BoxTuple> out;
  std::vector<std::size_t> pick(static_cast<std::size_t>(k));
  // Prefixes that end below x still cost time, so the walk itself is budgeted too.
  const std::int64_t node_cap = tuple_cap > INT64_MAX / 16 ? INT64_MAX : 16 * tuple_cap;
  std::int64_t nodes = 0;
  // Exact starts (1+rho)^j carry large numerators for small rho; bound what is kept.
  constexpr std::size_t kBitCap = std::size_t{1} << 31;
  std::size_t bits = 0;
  std::function<void(int, std::int64_t, std::int64_t)> walk = [&](int depth, std::int64_t plo, std::int64_t phi) {
    if (++nodes > node_cap) throw CapacityError("box partition search exceeds " + std::to_string(node_cap) + " nodes");
    if (depth == k) {
      if (phi < x) return;
      if (static_cast<std::int64_t>(out.size()) >= tuple_cap) {
        throw CapacityError("box partition exceeds tuple cap " + std::to_string(tuple_cap));
      }
      std::vector<mpq_class> lengths;
      lengths.reserve(pick.size());
      for (std::size_t idx : pick) {
        lengths.push_back(boxes[idx].start);
        bits += mpz_sizeinbase(boxes[idx].start.get_num_mpz_t(), 2) + mpz_sizeinbase(boxes[idx].start.get_den_mpz_t(), 2);
      }
      if (bits > kBitCap) throw CapacityError("box partition exceeds 256 MiB of exact box lengths");
      out.emplace_back(x, std::move(lengths), to_mpq(rho));
      return;
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const std::int64_t nlo = mul_sat(plo, boxes[i].ints.lo);
      if (nlo > top) break;  // box starts increase with i
      pick[static_cast<std::size_t>(depth)] = i;
      walk(depth + 1, nlo, mul_sat(phi, boxes[i].ints.hi - 1));
    }
  };
  walk(0, 1, 1);
  return out;
}

MeanValueSum sum_theorem2(const GammaTable& gamma, std::int64_t x, const ModulusFilter& filter, int workers) {
  if (!gamma.values.empty() && gamma.last() > 3 * x) {
    // only the nonzero part matters
    for (std::int64_t n = 3 * x + 1; n <= gamma.last(); ++n) {
      if (gamma(n) != 0) throw DomainError("gamma support exceeds 3x");
    }
  }
  return sum_abs_delta(gamma.view(), 3 * x, admissible_moduli(x, filter), filter.a, workers);
}

MeanValueSum sum_theorem2(std::int64_t x, const BoxTuple& bt, const ModulusFilter& filter, int workers) {
  return sum_theorem2(gamma_sieve(bt), x, filter, workers);
}

double reference_rho(double x) { return std::exp(-std::pow(std::log(x), 7.0 / 12.0)); }

}  // namespace plab
