#include "plab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "plab/arith.hpp"
#include "plab/boxes.hpp"
#include "plab/discrepancy.hpp"
#include "plab/divisor_windows.hpp"
#include "plab/errors.hpp"
#include "plab/exponents.hpp"

namespace plab {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string join_ints(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

std::string join_rationals(const std::vector<Rational>& v, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i].str();
  return s;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::int64_t r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

Rational parse_rational(const std::string& key, const std::string& v) {
  try {
    return Rational::parse(v);
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& v, F one) {
  std::vector<T> out;
  for (const auto& item : split(v, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(one(t));
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("out", "cannot write " + path);
  os << content;
}

ModulusFilter make_filter(const ExperimentConfig& c) {
  ModulusFilter f = ModulusFilter::standard(c.theta, c.varpi, c.a);
  f.squarefree_only = c.squarefree;
  if (c.smooth_exponent) f.smooth_exponent = *c.smooth_exponent;
  f.lower_exponent = c.lower_exponent;
  return f;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Row fields shared by the mean-value sums.
struct SumFields {
  std::string numerator, denominator, as_float;
  double value = 0.0;
};

SumFields sum_fields(const MeanValueSum& s) {
  return {s.sum.get_num().get_str(), s.sum.get_den().get_str(), fmt_double(s.sum.get_d()), s.sum.get_d()};
}

void run_sum5_or_bv(const ExperimentConfig& c, RunResult& res) {
  res.header = {"x", "k", "theta", "varpi", "a", "modulus_count", "sum_numerator", "sum_denominator",
                "sum_float", "envelope_thm1", "ratio", "sum_over_x"};
  if (c.x.empty()) return;
  const std::int64_t x_max = *std::max_element(c.x.begin(), c.x.end());
  const ArithTable table = sieve_tau_k(x_max, c.k);
  const ModulusFilter filter = make_filter(c);
  for (std::int64_t x : c.x) {
    const auto t0 = Clock::now();
    const MeanValueSum s = c.kind == ExperimentKind::sum5 ? sum_theorem1(table, x, filter, c.workers)
                                                          : sum_bv(table, x, c.theta, c.workers);
    const SumFields f = sum_fields(s);
    const double env = envelope_eval({EnvelopeForm::thm1}, static_cast<double>(x));
    res.rows.push_back({{std::to_string(x), std::to_string(c.k), c.theta.str(), c.varpi.str(),
                         c.kind == ExperimentKind::sum5 ? std::to_string(c.a) : "max", std::to_string(s.modulus_count),
                         f.numerator, f.denominator, f.as_float, fmt_double(env), fmt_double(f.value / env),
                         fmt_double(f.value / static_cast<double>(x))},
                        seconds_since(t0)});
  }
}

BoxTuple sum6_boxes(const ExperimentConfig& c, std::int64_t x) {
  if (!c.lengths.empty()) return BoxTuple::from_lengths(x, c.lengths, c.rho);
  std::vector<Rational> nu = c.nu;
  if (nu.empty()) nu.assign(static_cast<std::size_t>(c.k), Rational(1, c.k));
  return BoxTuple::from_exponents(x, nu, c.rho);
}

void run_sum6(const ExperimentConfig& c, RunResult& res) {
  res.header = {"x", "k", "theta", "varpi", "a", "rho", "lengths", "in_window", "modulus_count", "sum_numerator",
                "sum_denominator", "sum_float", "envelope_thm2", "ratio", "sum_over_x"};
  const ModulusFilter filter = make_filter(c);
  for (std::int64_t x : c.x) {
    const auto t0 = Clock::now();
    const BoxTuple bt = sum6_boxes(c, x);
    std::string lengths;
    for (std::size_t i = 0; i < bt.lengths().size(); ++i) lengths += (i ? ";" : "") + bt.lengths()[i].get_str();
    const MeanValueSum s = sum_theorem2(x, bt, filter, c.workers);
    const SumFields f = sum_fields(s);
    const double env = envelope_eval({EnvelopeForm::thm2}, static_cast<double>(x));
    res.rows.push_back({{std::to_string(x), std::to_string(bt.k()), c.theta.str(), c.varpi.str(), std::to_string(c.a),
                         c.rho.str(), lengths, bt.product_in_window() ? "1" : "0", std::to_string(s.modulus_count),
                         f.numerator, f.denominator, f.as_float, fmt_double(env), fmt_double(f.value / env),
                         fmt_double(f.value / static_cast<double>(x))},
                        seconds_since(t0)});
  }
}

// Lengths (r, ..., r, x / r^{k-1}) with r the least integer with r^k >= x:
// nonincreasing, product exactly x.
BoxTuple centered_boxes(std::int64_t x, int k, const Rational& rho) {
  std::int64_t r = 1;
  auto pow_k = [&](std::int64_t b, int e) {
    std::int64_t p = 1;
    for (int i = 0; i < e; ++i) p *= b;
    return p;
  };
  while (pow_k(r, k) < x) ++r;
  std::vector<Rational> lengths(static_cast<std::size_t>(k - 1), Rational(r));
  lengths.emplace_back(x, pow_k(r, k - 1));
  if (k == 1) lengths = {Rational(x)};
  return BoxTuple::from_lengths(x, lengths, rho);
}

struct BoxChecks {
  bool support_ok = true;
  bool mass_ok = true;
};

BoxChecks check_gamma(const BoxTuple& bt, const GammaTable& g, std::int64_t x, bool require_window) {
  BoxChecks ch;
  if (g.mass() != bt.lattice_points()) ch.mass_ok = false;
  mpq_class lo_q = 1;
  mpq_class hi_q = 1;
  for (const auto& n : bt.lengths()) {
    lo_q *= n;
    hi_q *= n * (1 + bt.rho());
  }
  for (std::int64_t n = g.first; n <= g.last(); ++n) {
    if (g(n) == 0) continue;
    if (mpq_class(to_mpz(n)) < lo_q || mpq_class(to_mpz(n)) >= hi_q) ch.support_ok = false;
    if (require_window && (n < x || n >= 3 * x)) ch.support_ok = false;
  }
  return ch;
}

void run_boxes_identity(const ExperimentConfig& c, RunResult& res) {
  res.header = {"x", "k", "rho", "tuples", "n_checked", "mismatches", "support_ok", "mass_ok",
                "centered_support_ok", "centered_mass_ok"};
  mpq_class growth = 1;
  const mpq_class one_plus_rho = mpq_class(to_mpz(c.rho.num()), to_mpz(c.rho.den())) + 1;
  for (int i = 0; i < c.k; ++i) growth *= one_plus_rho;
  const bool narrow = growth <= 3;
  for (std::int64_t x : c.x) {
    const auto t0 = Clock::now();
    const std::vector<BoxTuple> tuples = box_partition(x, c.rho, c.k);
    std::vector<std::int64_t> acc(static_cast<std::size_t>(x), 0);  // n in [x, 2x)
    BoxChecks all;
    for (const auto& bt : tuples) {
      const GammaTable g = gamma_sieve(bt);
      const BoxChecks ch = check_gamma(bt, g, x, false);
      all.support_ok = all.support_ok && ch.support_ok;
      all.mass_ok = all.mass_ok && ch.mass_ok;
      for (std::int64_t n = std::max(g.first, x); n <= std::min(g.last(), 2 * x - 1); ++n) {
        acc[static_cast<std::size_t>(n - x)] += g(n);
      }
    }
    const ArithTable tau = sieve_tau_k(2 * x - 1, c.k);
    std::int64_t mismatches = 0;
    for (std::int64_t n = x; n < 2 * x; ++n) {
      if (acc[static_cast<std::size_t>(n - x)] != tau[n]) ++mismatches;
    }
    const BoxTuple centered = centered_boxes(x, c.k, c.rho);
    const BoxChecks cc = check_gamma(centered, gamma_sieve(centered), x, narrow);
    const bool ok = mismatches == 0 && all.support_ok && all.mass_ok && cc.support_ok && cc.mass_ok;
    if (!ok) res.verification_failed = true;
    res.rows.push_back({{std::to_string(x), std::to_string(c.k), c.rho.str(), std::to_string(tuples.size()),
                         std::to_string(x), std::to_string(mismatches), all.support_ok ? "1" : "0",
                         all.mass_ok ? "1" : "0", cc.support_ok ? "1" : "0", cc.mass_ok ? "1" : "0"},
                        seconds_since(t0)});
  }
}

void run_lemma1_grid(const ExperimentConfig& c, RunResult& res) {
  res.header = {"x", "k", "denominator", "varpi", "delta", "tuples", "applicable", "counterexamples",
                "case_a", "case_b", "case_c", "min_margin"};
  res.extra_header = {"x", "nu", "witness", "raw", "witness_sum"};
  for (std::int64_t x : c.x) {
    const auto t0 = Clock::now();
    const Rational delta = log2_over_logx_bound(x);
    const Lemma1GridSummary s = lemma1_grid(c.k, multiples_grid(c.denominator, delta), x, c.varpi, c.workers,
                                            !c.extra_out.empty());
    if (s.counterexamples != 0) res.verification_failed = true;
    res.rows.push_back({{std::to_string(x), std::to_string(c.k), std::to_string(c.denominator), c.varpi.str(),
                         delta.str(), std::to_string(s.tuples), std::to_string(s.applicable),
                         std::to_string(s.counterexamples), std::to_string(s.case_a), std::to_string(s.case_b),
                         std::to_string(s.case_c), s.min_margin.str()},
                        seconds_since(t0)});
    for (const auto& [t, label] : s.witnesses) {
      res.extra_rows.push_back({std::to_string(x), join(t.nu), join(label.witness), join(label.raw),
                                label.witness_sum.str()});
    }
  }
}

void run_lemma2_range(const ExperimentConfig& c, RunResult& res) {
  res.header = {"x", "theta", "varpi", "eps", "z0", "grid_points", "candidates", "admissible", "instances",
                "constructed", "oracle_found", "failures", "disagreements", "bound_violations", "passed"};
  res.extra_header = {"d", "d0", "d1", "d2", "R", "r", "ratio_used", "oracle_agrees"};
  for (std::int64_t x : c.x) {
    const auto t0 = Clock::now();
    Lemma2Params p;
    p.x = x;
    p.theta = c.theta;
    p.varpi = c.varpi;
    p.eps = c.eps;
    p.z0 = PowerBound::constant(c.z0);
    const std::vector<Rational> grid = c.r_grid.empty() ? default_r_grid(c.varpi) : c.r_grid;
    Lemma2Options opt;
    opt.enforce_smooth_part = c.enforce_smooth_part;
    opt.workers = c.workers;
    opt.keep_rows = !c.extra_out.empty();
    const Lemma2Summary s = lemma2_verify_range(p, grid, opt);
    if (!s.passed()) res.verification_failed = true;
    res.rows.push_back({{std::to_string(x), c.theta.str(), c.varpi.str(), c.eps.str(), c.z0.str(),
                         std::to_string(grid.size()), std::to_string(s.candidates), std::to_string(s.admissible),
                         std::to_string(s.instances), std::to_string(s.constructed), std::to_string(s.oracle_found),
                         std::to_string(s.failures), std::to_string(s.disagreements),
                         std::to_string(s.bound_violations), s.passed() ? "1" : "0"},
                        seconds_since(t0)});
    for (const auto& r : s.rows) {
      res.extra_rows.push_back({std::to_string(r.d), std::to_string(r.d0), std::to_string(r.d1), std::to_string(r.d2),
                                fmt_double(r.R), r.r ? std::to_string(*r.r) : "", fmt_double(r.ratio_used),
                                r.oracle_agrees ? "1" : "0"});
    }
  }
}

void run_classify(const ExperimentConfig& c, RunResult& res) {
  res.header = {"x", "varpi", "nu", "case", "witness", "raw", "witness_sum", "lemma1"};
  for (std::int64_t x : c.x) {
    const auto t0 = Clock::now();
    const ExponentTuple t(c.nu, x, c.varpi);
    const CaseLabel label = classify(t);
    const std::string lemma = t.k() >= 4 ? to_string(lemma1_check(t).status) : "n/a";
    if (lemma == "counterexample") res.verification_failed = true;
    res.rows.push_back({{std::to_string(x), c.varpi.str(), join(t.nu), to_string(label.variant), join(label.witness),
                         join(label.raw), label.variant == CaseVariant::C ? label.witness_sum.str() : "", lemma},
                        seconds_since(t0)});
  }
}

void run_sw_surrogate(const ExperimentConfig& c, RunResult& res) {
  res.header = {"index", "lo", "hi", "q", "r", "a", "value", "value_float", "bound", "within_bound"};
  std::mt19937_64 rng(c.seed);
  auto uniform = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  for (std::int64_t i = 0; i < c.instances; ++i) {
    const auto t0 = Clock::now();
    const std::int64_t n = uniform(1, c.max_n);
    const IntRange box{n, n + uniform(1, n)};
    const std::int64_t q = uniform(1, 1000);
    const std::int64_t r = uniform(1, 100);
    std::int64_t a = uniform(1, r);
    while (std::gcd(a, r) != 1) a = uniform(1, r);
    const Rational v = sw_surrogate(box, q, r, a);
    const std::int64_t bound = std::int64_t{2} << factorize(q).omega();
    const bool within = abs(v) <= Rational(bound);
    if (!within) res.verification_failed = true;
    res.rows.push_back({{std::to_string(i), std::to_string(box.lo), std::to_string(box.hi), std::to_string(q),
                         std::to_string(r), std::to_string(a), v.str(), fmt_double(v.to_double()),
                         std::to_string(bound), within ? "1" : "0"},
                        seconds_since(t0)});
  }
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::sum5: return "sum5";
    case ExperimentKind::sum6: return "sum6";
    case ExperimentKind::bv: return "bv";
    case ExperimentKind::boxes_identity: return "boxes-identity";
    case ExperimentKind::lemma1_grid: return "lemma1-grid";
    case ExperimentKind::lemma2_range: return "lemma2-range";
    case ExperimentKind::classify: return "classify";
    case ExperimentKind::sw_surrogate: return "sw-surrogate";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::sum5, ExperimentKind::sum6, ExperimentKind::bv, ExperimentKind::boxes_identity,
                 ExperimentKind::lemma1_grid, ExperimentKind::lemma2_range, ExperimentKind::classify,
                 ExperimentKind::sw_surrogate}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("kind", "unknown experiment kind '" + s + "'");
}

void ExperimentConfig::validate() const {
  for (std::int64_t v : x) {
    if (v < 10) throw ConfigError("x", "values must be >= 10");
  }
  if (k < 1) throw ConfigError("k", "must be >= 1");
  auto unit = [](const char* key, const Rational& r) {
    if (!(Rational(0) < r && r < Rational(1))) throw ConfigError(key, "must lie in (0, 1)");
  };
  unit("theta", theta);
  unit("varpi", varpi);
  unit("eps", eps);
  if (rho <= Rational(0)) throw ConfigError("rho", "must be positive");
  if (a == 0) throw ConfigError("a", "must be nonzero");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (denominator < 1) throw ConfigError("denominator", "must be >= 1");
  if (instances < 0) throw ConfigError("instances", "must be >= 0");
  if (max_n < 1) throw ConfigError("max_n", "must be >= 1");
  if (z0 <= Rational(0)) throw ConfigError("z0", "must be positive");
  if (kind == ExperimentKind::classify && nu.empty()) throw ConfigError("nu", "classify needs an exponent tuple");
  if (kind == ExperimentKind::lemma1_grid && k < 4) throw ConfigError("k", "lemma1-grid needs k >= 4");
  if (kind == ExperimentKind::sum6 && !nu.empty() && static_cast<int>(nu.size()) != k) {
    throw ConfigError("nu", "length must equal k");
  }
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "kind = " << to_string(kind) << "\n";
  os << "x = " << join_ints(x) << "\n";
  os << "k = " << k << "\n";
  os << "theta = " << theta.str() << "\n";
  os << "varpi = " << varpi.str() << "\n";
  os << "eps = " << eps.str() << "\n";
  os << "rho = " << rho.str() << "\n";
  os << "a = " << a << "\n";
  os << "squarefree = " << (squarefree ? "true" : "false") << "\n";
  if (smooth_exponent) os << "smooth_exponent = " << smooth_exponent->str() << "\n";
  if (lower_exponent) os << "lower_exponent = " << lower_exponent->str() << "\n";
  if (!nu.empty()) os << "nu = " << join_rationals(nu) << "\n";
  if (!lengths.empty()) os << "lengths = " << join_rationals(lengths) << "\n";
  os << "denominator = " << denominator << "\n";
  if (!r_grid.empty()) os << "r_grid = " << join_rationals(r_grid) << "\n";
  os << "z0 = " << z0.str() << "\n";
  os << "enforce_smooth_part = " << (enforce_smooth_part ? "true" : "false") << "\n";
  os << "instances = " << instances << "\n";
  os << "max_n = " << max_n << "\n";
  os << "seed = " << seed << "\n";
  os << "workers = " << workers << "\n";
  if (!out.empty()) os << "out = " << out << "\n";
  if (!svg.empty()) os << "svg = " << svg << "\n";
  if (!extra_out.empty()) os << "extra_out = " << extra_out << "\n";
  return os.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    auto rationals = [&] { return parse_list<Rational>(v, [&](const std::string& s) { return parse_rational(key, s); }); };
    if (key == "kind") {
      c.kind = experiment_kind_from_string(v);
    } else if (key == "x") {
      c.x = parse_list<std::int64_t>(v, [&](const std::string& s) { return parse_int(key, s); });
    } else if (key == "k") {
      c.k = static_cast<int>(parse_int(key, v));
    } else if (key == "theta") {
      c.theta = parse_rational(key, v);
    } else if (key == "varpi") {
      c.varpi = parse_rational(key, v);
    } else if (key == "eps") {
      c.eps = parse_rational(key, v);
    } else if (key == "rho") {
      c.rho = parse_rational(key, v);
    } else if (key == "a") {
      c.a = parse_int(key, v);
    } else if (key == "squarefree") {
      c.squarefree = parse_bool(key, v);
    } else if (key == "smooth_exponent") {
      c.smooth_exponent = parse_rational(key, v);
    } else if (key == "lower_exponent") {
      c.lower_exponent = parse_rational(key, v);
    } else if (key == "nu") {
      c.nu = rationals();
    } else if (key == "lengths") {
      c.lengths = rationals();
    } else if (key == "denominator") {
      c.denominator = parse_int(key, v);
    } else if (key == "r_grid") {
      c.r_grid = rationals();
    } else if (key == "z0") {
      c.z0 = parse_rational(key, v);
    } else if (key == "enforce_smooth_part") {
      c.enforce_smooth_part = parse_bool(key, v);
    } else if (key == "instances") {
      c.instances = parse_int(key, v);
    } else if (key == "max_n") {
      c.max_n = parse_int(key, v);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    } else if (key == "workers") {
      c.workers = static_cast<int>(parse_int(key, v));
    } else if (key == "out") {
      c.out = v;
    } else if (key == "svg") {
      c.svg = v;
    } else if (key == "extra_out") {
      c.extra_out = v;
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

std::string RunResult::csv() const {
  std::vector<std::vector<std::string>> r;
  r.reserve(rows.size());
  for (const auto& row : rows) r.push_back(row.fields);
  return write_csv(header, r);
}

std::string RunResult::extra_csv() const { return write_csv(extra_header, extra_rows); }

const std::string& RunResult::field(std::size_t row, const std::string& column) const {
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw DomainError("no column " + column);
  return rows.at(row).fields.at(static_cast<std::size_t>(it - header.begin()));
}

RunResult run(const ExperimentConfig& config) {
  config.validate();
  RunResult res;
  res.kind = config.kind;
  switch (config.kind) {
    case ExperimentKind::sum5:
    case ExperimentKind::bv: run_sum5_or_bv(config, res); break;
    case ExperimentKind::sum6: run_sum6(config, res); break;
    case ExperimentKind::boxes_identity: run_boxes_identity(config, res); break;
    case ExperimentKind::lemma1_grid: run_lemma1_grid(config, res); break;
    case ExperimentKind::lemma2_range: run_lemma2_range(config, res); break;
    case ExperimentKind::classify: run_classify(config, res); break;
    case ExperimentKind::sw_surrogate: run_sw_surrogate(config, res); break;
  }
  if (!config.out.empty()) write_file(config.out, res.csv());
  if (!config.extra_out.empty() && !res.extra_header.empty()) write_file(config.extra_out, res.extra_csv());
  const bool sums = config.kind == ExperimentKind::sum5 || config.kind == ExperimentKind::sum6 ||
                    config.kind == ExperimentKind::bv;
  if (!config.svg.empty() && sums) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      xs.push_back(std::stod(res.field(i, "x")));
      ys.push_back(std::stod(res.field(i, "sum_over_x")));
    }
    write_file(config.svg, decay_svg(to_string(config.kind) + " k=" + std::to_string(config.k), xs, ys));
  }
  return res;
}

bool is_float_column(const std::string& name) {
  auto ends_with = [&](const std::string& suf) {
    return name.size() >= suf.size() && name.compare(name.size() - suf.size(), suf.size(), suf) == 0;
  };
  return name == "ratio" || name == "R" || name == "ratio_used" || name == "sum_over_x" || ends_with("_float") ||
         name.rfind("envelope", 0) == 0;
}

CompareReport snapshot_compare(const std::string& current_csv, const std::string& golden_csv) {
  const auto cur = read_csv(current_csv);
  const auto gold = read_csv(golden_csv);
  if (cur.empty() || gold.empty() || cur.front() != gold.front()) throw DomainError("CSV header mismatch");
  const auto& header = cur.front();
  CompareReport rep;
  auto sig12 = [](const std::string& s) {
    try {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.11e", std::stod(s));
      return std::string(buf);
    } catch (const std::exception&) {
      return s;
    }
  };
  const std::size_t n = std::max(cur.size(), gold.size());
  for (std::size_t i = 1; i < n; ++i) {
    if (i >= cur.size()) {
      rep.diffs.push_back("row " + std::to_string(i) + ": missing from current");
      continue;
    }
    if (i >= gold.size()) {
      rep.diffs.push_back("row " + std::to_string(i) + ": not in golden");
      continue;
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
      const std::string a = j < cur[i].size() ? cur[i][j] : "";
      const std::string b = j < gold[i].size() ? gold[i][j] : "";
      const bool same = is_float_column(header[j]) ? sig12(a) == sig12(b) : a == b;
      if (!same) rep.diffs.push_back("row " + std::to_string(i) + ", " + header[j] + ": " + a + " != " + b);
    }
  }
  return rep;
}

std::string write_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  auto line = [&](const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + f[i];
    s += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(split(line, ','));
  }
  return out;
}

std::string decay_svg(const std::string& title, const std::vector<double>& xs, const std::vector<double>& sum_over_x) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  std::vector<double> lx, all_y;
  for (double x : xs) lx.push_back(std::log10(x));
  auto env = [](EnvelopeForm f, double x) { return envelope_eval({f}, x) / x; };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (sum_over_x[i] > 0) all_y.push_back(std::log10(sum_over_x[i]));
    all_y.push_back(std::log10(env(EnvelopeForm::thm1, xs[i])));
    all_y.push_back(std::log10(env(EnvelopeForm::thm2, xs[i])));
  }
  double x0 = lx.empty() ? 0 : *std::min_element(lx.begin(), lx.end());
  double x1 = lx.empty() ? 1 : *std::max_element(lx.begin(), lx.end());
  double y0 = all_y.empty() ? 0 : std::floor(*std::min_element(all_y.begin(), all_y.end()));
  double y1 = all_y.empty() ? 1 : std::ceil(*std::max_element(all_y.begin(), all_y.end()));
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">" << title
     << ": sum/x vs x (log-log)</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (double v = y0; v <= y1 + 1e-9; v += 1) {
    os << "<text x=\"" << L - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">1e" << v
       << "</text>\n";
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << "<text x=\"" << px(lx[i]) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">1e"
       << fmt_double(std::round(lx[i] * 100) / 100) << "</text>\n";
  }
  auto polyline = [&](const std::vector<double>& ys, const char* color, const char* dash) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-dasharray=\"" << dash << "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (ys[i] > 0) os << px(lx[i]) << "," << py(std::log10(ys[i])) << " ";
    }
    os << "\"/>\n";
  };
  std::vector<double> e1, e2;
  for (double x : xs) {
    e1.push_back(env(EnvelopeForm::thm1, x));
    e2.push_back(env(EnvelopeForm::thm2, x));
  }
  polyline(sum_over_x, "#1f77b4", "none");
  polyline(e1, "#d62728", "6,3");
  polyline(e2, "#2ca02c", "2,3");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (sum_over_x[i] > 0) {
      os << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(std::log10(sum_over_x[i])) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
  }
  os << "<text x=\"" << W - R - 200 << "\" y=\"" << T + 10 << "\" font-size=\"11\" fill=\"#1f77b4\">sum / x</text>\n";
  os << "<text x=\"" << W - R - 200 << "\" y=\"" << T + 24
     << "\" font-size=\"11\" fill=\"#d62728\">exp(-(log x)^(1/2))</text>\n";
  os << "<text x=\"" << W - R - 200 << "\" y=\"" << T + 38
     << "\" font-size=\"11\" fill=\"#2ca02c\">exp(-(log x)^(2/3))</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string reference_parameters_report(double x) {
  const Rational theta(293, 584);
  const Rational varpi(1, 1168);
  const double lx = std::log(x);
  auto xp = [&](const Rational& e) { return std::exp(e.to_double() * lx); };
  std::ostringstream os;
  os.precision(6);
  os << "x                          = " << x << "\n";
  os << "theta, varpi               = " << theta.str() << ", " << varpi.str() << "\n";
  os << "theta = 1/2 + 2 varpi      : " << (theta_varpi_relation(theta, varpi) ? "yes" : "no") << "\n";
  os << "43(theta-1/2)+27varpi < 1  : " << (polymath_feasible(theta, varpi) ? "yes" : "no") << "\n";
  os << "x^theta (modulus range)    = " << xp(theta) << "\n";
  os << "x^varpi (P_1 threshold)    = " << xp(varpi) << "\n";
  os << "x^(1/8-4varpi)             = " << xp(Rational(1, 8) - Rational(4) * varpi) << "\n";
  os << "exp((log x)^(1/4)) (P_0)   = " << reference_z0(x) << "\n";
  os << "rho = exp(-(log x)^(7/12)) = " << reference_rho(x) << "\n";
  os << "medium interval            = [" << medium_low(varpi).str() << ", " << medium_high(varpi).str() << "]\n";
  os << "log x needed for x^varpi>=2: " << 1168 * std::log(2.0) << " (x ~ 10^" << 1168 * std::log10(2.0) << ")\n";
  os << "varpi < 1/320 (case split) : " << (varpi_admissible(varpi) ? "yes" : "no") << "\n";
  return os.str();
}

}  // namespace plab
