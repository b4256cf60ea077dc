// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance          run all criteria, exit 1 if any fails
//   acceptance N [M..]  run the listed criteria only
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "plab/arith.hpp"
#include "plab/boxes.hpp"
#include "plab/discrepancy.hpp"
#include "plab/divisor_windows.hpp"
#include "plab/exponents.hpp"
#include "plab/harness.hpp"

using namespace plab;

namespace {

// Wall-clock limits in seconds. Exactness criteria have zero tolerance.
constexpr double kLimit1 = 10;
constexpr double kLimit2 = 30;
constexpr double kLimit3 = 60;
constexpr double kLimit4 = 60;
constexpr double kLimit5 = 120;
constexpr double kLimit6 = 300;
constexpr double kLimit7 = 10;
constexpr double kLimit8 = 30;
constexpr double kLimit9 = 120;
constexpr double kLimit10 = 300;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::function<std::int64_t(std::int64_t)> table_fn(std::vector<std::int64_t> t) {
  auto p = std::make_shared<std::vector<std::int64_t>>(std::move(t));
  return [p](std::int64_t n) {
    return n >= 0 && n < static_cast<std::int64_t>(p->size()) ? (*p)[static_cast<std::size_t>(n)] : 0;
  };
}

Outcome tau_oracle() {
  std::int64_t checked = 0, bad = 0;
  for (int k = 1; k <= 6; ++k) {
    const auto t = sieve_tau_k(5000, k);
    for (std::int64_t n = 1; n <= 5000; ++n, ++checked) bad += t[n] != oracle::tau_k(n, k);
  }
  return {bad == 0, std::to_string(checked) + " values, " + std::to_string(bad) + " mismatches"};
}

Outcome discrepancy_identities() {
  std::int64_t sums = 0, nonzero = 0, values = 0, bad = 0;
  for (int k = 2; k <= 4; ++k) {
    const auto t = sieve_tau_k(2000, k);
    const auto f = table_fn(oracle::tau_table(2000, k));
    for (std::int64_t x : {100, 1000, 2000}) {
      for (std::int64_t d = 1; d <= 50; ++d) {
        std::int64_t total = 0;
        for (std::int64_t a = 1; a <= d; ++a) {
          if (std::gcd(a, d) != 1) continue;
          const auto v = delta(t, x, d, a);
          total += v.numerator;
          ++values;
          if (v.value() != oracle::delta(f, x, d, a)) ++bad;
        }
        ++sums;
        nonzero += total != 0;
      }
    }
  }
  return {nonzero == 0 && bad == 0, std::to_string(sums) + " residue sums (" + std::to_string(nonzero) +
                                        " nonzero), " + std::to_string(values) + " deltas vs double loop (" +
                                        std::to_string(bad) + " mismatches)"};
}

struct BoxCase {
  std::int64_t x;
  int k;
  Rational rho;
};
const BoxCase kBoxCases[] = {{50, 2, Rational(1, 2)}, {100, 3, Rational(3, 10)}, {1000, 4, Rational(1, 10)}};

Outcome partition_identity() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& c : kBoxCases) {
    const auto tuples = box_partition(c.x, c.rho, c.k);
    std::vector<std::int64_t> acc(static_cast<std::size_t>(c.x), 0);
    for (const auto& bt : tuples) {
      const auto g = gamma_sieve(bt);
      for (std::int64_t n = c.x; n < 2 * c.x; ++n) acc[static_cast<std::size_t>(n - c.x)] += g(n);
    }
    const auto tau = oracle::tau_table(2 * c.x, c.k);
    std::int64_t bad = 0;
    for (std::int64_t n = c.x; n < 2 * c.x; ++n) bad += acc[static_cast<std::size_t>(n - c.x)] != tau[static_cast<std::size_t>(n)];
    ok = ok && bad == 0;
    os << "(" << c.x << "," << c.k << "," << c.rho.str() << "): " << tuples.size() << " tuples, " << bad
       << " mismatches; ";
  }
  return {ok, os.str()};
}

// Integers in [N, (1+rho) N), counted from the definition.
std::int64_t box_count(const mpq_class& n, const mpq_class& rho) {
  const mpq_class hi = n * (1 + rho);
  mpz_class lo_int, hi_int;
  mpz_cdiv_q(lo_int.get_mpz_t(), n.get_num_mpz_t(), n.get_den_mpz_t());    // ceil N
  mpz_cdiv_q(hi_int.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());  // ceil hi, excluded
  return std::max<long>(0, mpz_class(hi_int - lo_int).get_si());
}

Outcome support_and_mass() {
  std::ostringstream os;
  bool ok = true;
  for (const auto& c : kBoxCases) {
    // (1 + rho)^k <= 3 on every instance
    mpq_class growth = 1;
    for (int i = 0; i < c.k; ++i) growth *= mpq_class(c.rho.num(), c.rho.den()) + 1;
    if (growth > 3) ok = false;

    // Partition tuples: mass and the support interval [prod N, prod (1+rho) N).
    std::int64_t mass_bad = 0, support_bad = 0;
    const auto tuples = box_partition(c.x, c.rho, c.k);
    for (const auto& bt : tuples) {
      const auto g = gamma_sieve(bt);
      std::int64_t expect = 1;
      mpq_class lo = 1, hi = 1;
      for (const auto& n : bt.lengths()) {
        expect *= box_count(n, bt.rho());
        lo *= n;
        hi *= n * (1 + bt.rho());
      }
      mass_bad += g.mass() != expect;
      for (std::int64_t n = g.first; n <= g.last(); ++n) {
        if (g(n) != 0 && (mpq_class(static_cast<long>(n)) < lo || mpq_class(static_cast<long>(n)) >= hi)) ++support_bad;
      }
    }

    // A tuple with product exactly x: (r, ..., r, x / r^{k-1}), r^k >= x.
    std::int64_t r = 1;
    auto pw = [](std::int64_t b, int e) {
      std::int64_t p = 1;
      while (e-- > 0) p *= b;
      return p;
    };
    while (pw(r, c.k) < c.x) ++r;
    std::vector<Rational> ls(static_cast<std::size_t>(c.k - 1), Rational(r));
    ls.emplace_back(c.x, pw(r, c.k - 1));
    const auto centered = BoxTuple::from_lengths(c.x, ls, c.rho);
    const auto g = gamma_sieve(centered);
    std::vector<std::pair<std::int64_t, std::int64_t>> boxes;
    std::int64_t expect = 1;
    for (const auto& n : centered.lengths()) {
      mpz_class lo_int;
      mpz_cdiv_q(lo_int.get_mpz_t(), n.get_num_mpz_t(), n.get_den_mpz_t());
      const std::int64_t cnt = box_count(n, centered.rho());
      boxes.emplace_back(lo_int.get_si(), lo_int.get_si() + cnt);
      expect *= cnt;
    }
    std::int64_t window_bad = 0, value_bad = 0;
    std::int64_t enumerated = 0;
    for (auto [n, cnt] : oracle::gamma(boxes)) {
      enumerated += cnt;
      value_bad += g(n) != cnt;
      window_bad += n < c.x || n >= 3 * c.x;
    }
    for (std::int64_t n = g.first; n <= g.last(); ++n) {
      if (g(n) != 0 && (n < c.x || n >= 3 * c.x)) ++window_bad;
    }
    const bool centered_ok = g.mass() == expect && enumerated == expect && window_bad == 0 && value_bad == 0;
    ok = ok && mass_bad == 0 && support_bad == 0 && centered_ok;
    os << "(" << c.x << "," << c.k << "," << c.rho.str() << "): mass errors " << mass_bad << ", support errors "
       << support_bad << ", product-x tuple " << (centered_ok ? "inside [x,3x)" : "FAILED") << "; ";
  }
  return {ok, os.str()};
}

Outcome lemma1_machine_check() {
  const std::int64_t x = 1'000'000;
  const Rational varpi(1, 1168);
  const Rational delta = log2_over_logx_bound(x);
  const auto summary = lemma1_grid(4, multiples_grid(40, delta), x, varpi);

  // Independent pass over the same grid, straight from the inequalities.
  const Rational lo = Rational(3, 8) + Rational(8) * varpi;
  const Rational hi = Rational(5, 8) - Rational(8) * varpi;
  std::int64_t tuples = 0, applicable = 0, failures = 0;
  for (int a = 0; a <= 42; ++a) {
    for (int b = 0; b <= a; ++b) {
      for (int c = 0; c <= b; ++c) {
        for (int d = 0; d <= c; ++d) {
          const std::vector<Rational> nu{Rational(a, 40), Rational(b, 40), Rational(c, 40), Rational(d, 40)};
          const Rational sum = nu[0] + nu[1] + nu[2] + nu[3];
          if (sum < Rational(1) || !(sum < Rational(1) + delta)) continue;
          ++tuples;
          if (!(nu[0] < hi)) continue;
          bool medium = false;
          for (const auto& s : oracle::subset_sums(nu)) medium = medium || (lo <= s && s <= hi);
          if (medium) continue;
          ++applicable;
          // l in [3, 4]: nu_2 + ... + nu_l > hi and nu_2 + ... + nu_{l-1} < lo
          bool l_ok = false;
          for (int l = 3; l <= 4 && !l_ok; ++l) {
            Rational upto_l = 0, before = 0;
            for (int i = 2; i <= l; ++i) upto_l += nu[static_cast<std::size_t>(i - 1)];
            for (int i = 2; i <= l - 1; ++i) before += nu[static_cast<std::size_t>(i - 1)];
            l_ok = upto_l > hi && before < lo && nu[static_cast<std::size_t>(l - 1)] > Rational(1, 4) - Rational(16) * varpi;
          }
          const bool pair = nu[1] + nu[2] > hi;
          const bool conclusion = nu[0] + nu[3] < lo + delta;
          if (!(l_ok && pair && conclusion)) ++failures;
        }
      }
    }
  }
  const bool ok = summary.counterexamples == 0 && failures == 0 && summary.tuples == tuples &&
                  summary.applicable == applicable && applicable > 0;
  return {ok, std::to_string(tuples) + " grid tuples, " + std::to_string(applicable) + " applicable, " +
                  std::to_string(summary.counterexamples) + " counterexamples (library), " +
                  std::to_string(failures) + " (independent pass)"};
}

Outcome lemma2_desk() {
  Lemma2Params p;
  p.x = 100'000;
  p.varpi = Rational(2, 25);
  p.theta = Rational(1, 2) + Rational(2) * p.varpi;
  p.eps = Rational(1, 20);
  p.z0 = PowerBound::constant(Rational(2));
  const auto grid = default_r_grid(p.varpi);
  const auto s = lemma2_verify_range(p, grid);
  std::int64_t grid_in_range = 0;
  for (const auto& e : grid) grid_in_range += branch_for(e, p.varpi).has_value();
  // Every returned r is re-checked here against the window contract.
  std::int64_t invalid = 0;
  for (const auto& row : s.rows) {
    if (!row.r) continue;
    const std::int64_t r = *row.r;
    const auto R = PowerBound::power(p.x, row.r_exponent);
    bool good = row.d % r == 0 && compare(r, R) > 0 && compare(r, p.ratio() * R) < 0;
    for (std::int64_t q : oracle::prime_factors(row.d / r)) good = good && q > 2;
    invalid += !good;
  }
  const bool ok = s.passed() && invalid == 0 && s.constructed == s.instances && grid_in_range == 8;
  std::ostringstream os;
  os << s.admissible << " admissible d, " << grid_in_range << "/8 grid points in a branch range, " << s.instances
     << " instances: constructed " << s.constructed << ", failed " << s.failures << ", oracle found "
     << s.oracle_found << ", disagreements " << s.disagreements << ", bound violations " << s.bound_violations
     << " (x^varpi = " << p.z1().to_double() << ": no prime lies in (z0, x^varpi])";
  return {ok, os.str()};
}

Outcome reference_constants() {
  bool ok = theta_k(2) == Rational(2, 3) && theta_k(3) == Rational(21, 41) && theta_k(4) == Rational(1, 2) &&
            theta_k(5) == Rational(9, 20) && theta_k(6) == Rational(5, 12);
  for (int k = 7; k <= 40; ++k) ok = ok && theta_k(k) == Rational(8, 3 * k);
  ok = ok && theta_varpi_relation(Rational(293, 584), Rational(1, 1168));
  ok = ok && polymath_feasible(Rational(293, 584), Rational(1, 1168));
  ok = ok && !varpi_admissible(Rational(1, 300)) && varpi_admissible(Rational(1, 1168));
  bool rejects = false;
  try {
    classify(ExponentTuple({Rational(1, 2), Rational(1, 2)}, 1'000'000, Rational(1, 300)));
  } catch (const std::domain_error&) {
    rejects = true;
  }
  bool accepts = true;
  try {
    classify(ExponentTuple({Rational(1, 2), Rational(1, 2)}, 1'000'000, Rational(1, 1168)));
  } catch (const std::exception&) {
    accepts = false;
  }
  ok = ok && rejects && accepts;
  return {ok, "theta_k table, theta = 1/2 + 2 varpi, 43(theta-1/2)+27varpi < 1, varpi < 1/320 gate"};
}

Outcome sw_random() {
  std::mt19937_64 rng(20240601);
  auto u = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  std::int64_t bad = 0, over = 0;
  for (int i = 0; i < 200; ++i) {
    const std::int64_t n = u(1, 10'000);
    const Rational rho(u(1, 100), 100);
    const std::int64_t hi = (Rational(n) * (Rational(1) + rho)).ceil();  // [N, (1+rho)N)
    const std::int64_t q = u(1, 30'030);
    const std::int64_t r = u(1, 500);
    std::int64_t a = u(0, r - 1);
    while (std::gcd(a, r) != 1) a = u(0, r - 1);
    const Rational v = sw_surrogate({n, hi}, q, r, a);
    bad += mpq_class(v.num(), v.den()) != oracle::sw(n, hi, q, r, a);
    const std::int64_t bound = std::int64_t{2} << oracle::prime_factors(q).size();
    over += abs(v) > Rational(bound);
  }
  return {bad == 0 && over == 0,
          "200 instances, " + std::to_string(bad) + " oracle mismatches, " + std::to_string(over) + " above 2*2^omega(q)"};
}

std::string exact_csv(const RunResult& r) {
  std::vector<std::size_t> keep;
  std::vector<std::string> header;
  for (std::size_t j = 0; j < r.header.size(); ++j) {
    if (!is_float_column(r.header[j])) {
      keep.push_back(j);
      header.push_back(r.header[j]);
    }
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) {
    std::vector<std::string> f;
    for (std::size_t j : keep) f.push_back(row.fields[j]);
    rows.push_back(f);
  }
  return write_csv(header, rows);
}

Outcome determinism() {
  ExperimentConfig c;
  c.kind = ExperimentKind::sum5;
  c.x = {10'000, 100'000};
  c.k = 4;
  c.workers = 1;
  const auto one = run(c);
  c.workers = 8;
  const auto eight = run(c);
  const bool ok = exact_csv(one) == exact_csv(eight) && one.rows.size() == 2;
  return {ok, std::string("exact columns ") + (ok ? "byte-identical" : "DIFFER") + " for 1 and 8 workers; full CSV " +
                  (one.csv() == eight.csv() ? "identical" : "differs")};
}

mpq_class oracle_sum5(std::int64_t x, const std::vector<std::int64_t>& tau) {
  auto f = [&](std::int64_t n) { return tau[static_cast<std::size_t>(n)]; };
  mpq_class s = 0;
  for (std::int64_t d = 2; d * d < x; ++d) {
    if (oracle::mu(d) != 0) s += abs(oracle::delta(f, x, d, 1));
  }
  return s;
}

mpq_class oracle_bv(std::int64_t x, const std::vector<std::int64_t>& tau) {
  auto f = [&](std::int64_t n) { return tau[static_cast<std::size_t>(n)]; };
  mpq_class s = 0;
  for (std::int64_t d = 2; d * d < x; ++d) {
    mpq_class best = 0;
    for (std::int64_t a = 1; a < d; ++a) {
      if (std::gcd(a, d) == 1) best = std::max<mpq_class>(best, abs(oracle::delta(f, x, d, a)));
    }
    s += best;
  }
  return s;
}

Outcome decay_observation() {
  ExperimentConfig c;
  c.k = 4;
  c.x = {10'000, 100'000, 1'000'000};
  c.theta = Rational(1, 2);
  c.varpi = Rational(1, 20);
  std::ostringstream os;
  bool ok = true;
  const auto tau = oracle::tau_table(10'000, 4);
  for (auto kind : {ExperimentKind::sum5, ExperimentKind::bv}) {
    c.kind = kind;
    const auto first = run(c);
    const auto second = run(c);
    ok = ok && first.csv() == second.csv() && first.rows.size() == 3;
    os << to_string(kind) << "/x:";
    for (std::size_t i = 0; i < first.rows.size(); ++i) {
      const double v = std::stod(first.field(i, "sum_over_x"));
      const double env = std::stod(first.field(i, "envelope_thm1"));
      ok = ok && std::isfinite(v) && std::isfinite(env);
      os << " " << first.field(i, "sum_over_x").substr(0, 8);
    }
    const mpq_class expect = kind == ExperimentKind::sum5 ? oracle_sum5(10'000, tau) : oracle_bv(10'000, tau);
    const bool match = first.field(0, "sum_numerator") == expect.get_num().get_str() &&
                       first.field(0, "sum_denominator") == expect.get_den().get_str();
    ok = ok && match;
    os << (match ? " (oracle match at 1e4); " : " (ORACLE MISMATCH at 1e4); ");
  }
  return {ok, os.str() + "reruns identical"};
}

struct Criterion {
  const char* name;
  double limit;
  Outcome (*fn)();
};

const std::map<int, Criterion> kCriteria{
    {1, {"tau_k oracle equivalence", kLimit1, tau_oracle}},
    {2, {"discrepancy identities", kLimit2, discrepancy_identities}},
    {3, {"box-partition identity", kLimit3, partition_identity}},
    {4, {"gamma support and mass", kLimit4, support_and_mass}},
    {5, {"lemma 1 machine check", kLimit5, lemma1_machine_check}},
    {6, {"lemma 2 verification at desk parameters", kLimit6, lemma2_desk}},
    {7, {"reference constants", kLimit7, reference_constants}},
    {8, {"small-modulus surrogate", kLimit8, sw_random}},
    {9, {"worker-count determinism", kLimit9, determinism}},
    {10, {"decay observation", kLimit10, decay_observation}},
};

bool run_one(int id) {
  const auto it = kCriteria.find(id);
  if (it == kCriteria.end()) {
    std::printf("criterion %d: FAIL unknown criterion\n", id);
    return false;
  }
  const auto& c = it->second;
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = c.fn();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < c.limit;
  const bool pass = out.pass && in_time;
  std::printf("criterion %d: %s  %s | %s | %.2f s (limit %.0f s%s)\n", id, pass ? "PASS" : "FAIL", c.name,
              out.detail.c_str(), secs, c.limit, in_time ? "" : ", EXCEEDED");
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (const auto& [id, c] : kCriteria) ids.push_back(id);
  }
  bool all = true;
  for (int id : ids) all = run_one(id) && all;
  return all ? 0 : 1;
}
