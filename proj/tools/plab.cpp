// plab: command-line front end. Each verb forwards to one library operation.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "plab/arith.hpp"
#include "plab/discrepancy.hpp"
#include "plab/errors.hpp"
#include "plab/exponents.hpp"
#include "plab/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitVerification = 4;

// Accepts 100000, 1e5 and 10^5.
std::int64_t parse_count(const std::string& s) {
  if (auto caret = s.find('^'); caret != std::string::npos) {
    const std::int64_t b = std::stoll(s.substr(0, caret));
    const int e = std::stoi(s.substr(caret + 1));
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) {
      if (r > INT64_MAX / b) throw plab::ConfigError("x", "value too large: " + s);
      r *= b;
    }
    return r;
  }
  std::size_t pos = 0;
  const double d = std::stod(s, &pos);
  if (pos != s.size() || d != std::floor(d) || d > 9e18) throw plab::ConfigError("x", "not an integer: " + s);
  return static_cast<std::int64_t>(d);
}

struct Flags {
  std::vector<std::string> x;
  int k = 4;
  std::string theta = "1/2", varpi = "1/20", eps = "1/100", rho = "1/10";
  std::int64_t a = 1;
  int workers = 1;
  std::string out, svg;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--x", f.x, "x values (comma separated; 1e5 and 10^5 accepted)")->delimiter(',');
  cmd->add_option("--k", f.k, "number of convolution factors");
  cmd->add_option("--theta", f.theta, "modulus exponent p/q");
  cmd->add_option("--varpi", f.varpi, "smoothness exponent p/q");
  cmd->add_option("--eps", f.eps, "epsilon p/q");
  cmd->add_option("--rho", f.rho, "box width p/q");
  cmd->add_option("--a", f.a, "residue class");
  cmd->add_option("--workers", f.workers, "worker threads");
  cmd->add_option("--out", f.out, "output path");
  cmd->add_option("--svg", f.svg, "decay plot path (sum experiments)");
}

plab::ExperimentConfig to_config(const Flags& f, plab::ExperimentKind kind) {
  plab::ExperimentConfig c;
  c.kind = kind;
  for (const auto& s : f.x) c.x.push_back(parse_count(s));
  c.k = f.k;
  auto rat = [](const char* key, const std::string& s) {
    try {
      return plab::Rational::parse(s);
    } catch (const std::exception& e) {
      throw plab::ConfigError(key, e.what());
    }
  };
  c.theta = rat("theta", f.theta);
  c.varpi = rat("varpi", f.varpi);
  c.eps = rat("eps", f.eps);
  c.rho = rat("rho", f.rho);
  c.a = f.a;
  c.workers = f.workers;
  c.out = f.out;
  c.svg = f.svg;
  return c;
}

int emit(const plab::RunResult& r, const plab::ExperimentConfig& c) {
  if (c.out.empty()) std::cout << r.csv();
  if (r.verification_failed) {
    std::cerr << "verification failed\n";
    return kExitVerification;
  }
  return kExitOk;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw plab::ConfigError("path", "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int real_main(int argc, char** argv) {
  CLI::App app{"divisor-function equidistribution experiments"};
  app.require_subcommand(1);

  Flags f;
  std::int64_t limit = 0;
  std::string kind = "tau";
  auto* sieve = app.add_subcommand("sieve", "tabulate tau_k, mu or phi on 1..limit");
  sieve->add_option("--limit", limit, "table size")->required();
  sieve->add_option("--kind", kind, "tau | mu | phi");
  sieve->add_option("--k", f.k, "tau_k order");
  sieve->add_option("--out", f.out, "binary table path; CSV on stdout otherwise");

  std::int64_t d = 0;
  auto* delta_cmd = app.add_subcommand("delta", "discrepancy of tau_k at (x, d, a)");
  add_common(delta_cmd, f);
  delta_cmd->add_option("--d", d, "modulus")->required();

  auto* sum5 = app.add_subcommand("sum5", "filtered mean value of |Delta| over smooth moduli");
  auto* sum6 = app.add_subcommand("sum6", "filtered mean value for a box convolution");
  auto* bv = app.add_subcommand("bv", "mean value of max_a |Delta| over all moduli");
  auto* boxes = app.add_subcommand("boxes", "box partition identity and gamma support checks");
  auto* classify = app.add_subcommand("classify", "case label of an exponent tuple");
  auto* lemma1 = app.add_subcommand("lemma1", "exhaustive grid check of the exponent lemma");
  auto* lemma2 = app.add_subcommand("lemma2", "divisor-in-window verification over a modulus range");
  auto* sw = app.add_subcommand("sw", "small-modulus surrogate on random or given boxes");
  for (auto* cmd : {sum5, sum6, bv, boxes, classify, lemma1, lemma2, sw}) add_common(cmd, f);

  std::string nu, lengths, r_grid, extra;
  std::string z0 = "2";
  std::int64_t denominator = 40;
  bool no_smooth = false;
  std::optional<std::string> smooth_exponent;
  sum5->add_option("--smooth-exponent", smooth_exponent, "override 1/8 - 4 varpi");
  sum6->add_option("--nu", nu, "box exponents, comma separated");
  sum6->add_option("--lengths", lengths, "explicit box lengths, comma separated");
  classify->add_option("--nu", nu, "exponent tuple, comma separated")->required();
  lemma1->add_option("--denominator", denominator, "grid spacing 1/denominator");
  lemma1->add_option("--witnesses", extra, "CSV of case C witnesses");
  lemma2->add_option("--r-grid", r_grid, "R exponents, comma separated");
  lemma2->add_option("--z0", z0, "tiny-prime threshold");
  lemma2->add_flag("--no-smooth-part", no_smooth, "drop the smooth-part condition on d");
  lemma2->add_option("--instances-out", extra, "per-instance CSV");
  std::int64_t instances = 200, max_n = 10'000, seed = 1;
  std::optional<std::int64_t> lo, hi, q, r;
  sw->add_option("--instances", instances, "random instances");
  sw->add_option("--max-n", max_n, "largest box start");
  sw->add_option("--seed", seed, "random seed");
  sw->add_option("--lo", lo, "box start (single evaluation)");
  sw->add_option("--hi", hi, "box end, exclusive");
  sw->add_option("--q", q, "coprimality modulus");
  sw->add_option("--r", r, "progression modulus");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config file");
  run_cmd->add_option("config", config_path, "config path")->required();
  run_cmd->add_option("--workers", f.workers, "override worker count");
  run_cmd->add_option("--out", f.out, "override output path");

  std::string current, golden;
  auto* compare = app.add_subcommand("compare", "diff a CSV against a golden snapshot");
  compare->add_option("current", current)->required();
  compare->add_option("golden", golden)->required();

  double params_x = 1e10;
  auto* params = app.add_subcommand("params", "print the reference parameter set evaluated at x");
  params->add_option("--x", params_x, "x");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  using plab::ExperimentKind;
  if (sieve->parsed()) {
    plab::ArithTable t = kind == "mu"    ? plab::sieve_mu(limit)
                         : kind == "phi" ? plab::sieve_phi(limit)
                         : kind == "tau" ? plab::sieve_tau_k(limit, f.k)
                                         : throw plab::ConfigError("kind", "expected tau, mu or phi");
    if (!f.out.empty()) {
      plab::save_table(t, f.out);
    } else {
      std::cout << "n," << t.name() << "\n";
      for (std::int64_t n = 1; n <= t.limit(); ++n) std::cout << n << "," << t[n] << "\n";
    }
    return kExitOk;
  }
  if (delta_cmd->parsed()) {
    const auto c = to_config(f, ExperimentKind::sum5);
    if (c.x.size() != 1) throw plab::ConfigError("x", "delta takes a single x");
    const auto t = plab::sieve_tau_k(c.x[0], c.k);
    const auto v = plab::delta(t, c.x[0], d, c.a);
    std::cout << "numerator,denominator,value\n" << v.numerator << "," << v.denominator << "," << v.to_double() << "\n";
    return kExitOk;
  }
  if (sw->parsed() && q) {
    if (!lo || !hi || !r) throw plab::ConfigError("sw", "--lo, --hi, --q and --r go together");
    const auto v = plab::sw_surrogate({*lo, *hi}, *q, *r, f.a);
    std::cout << "value,value_float\n" << v.str() << "," << v.to_double() << "\n";
    return kExitOk;
  }
  if (run_cmd->parsed()) {
    auto c = plab::ExperimentConfig::load(config_path);
    if (run_cmd->count("--workers")) c.workers = f.workers;
    if (run_cmd->count("--out")) c.out = f.out;
    c.validate();
    return emit(plab::run(c), c);
  }
  if (compare->parsed()) {
    const auto rep = plab::snapshot_compare(slurp(current), slurp(golden));
    for (const auto& line : rep.diffs) std::cout << line << "\n";
    return rep.identical() ? kExitOk : kExitVerification;
  }
  if (params->parsed()) {
    std::cout << plab::reference_parameters_report(params_x);
    return kExitOk;
  }

  const std::pair<CLI::App*, ExperimentKind> kinds[] = {
      {sum5, ExperimentKind::sum5},       {sum6, ExperimentKind::sum6},
      {bv, ExperimentKind::bv},           {boxes, ExperimentKind::boxes_identity},
      {classify, ExperimentKind::classify}, {lemma1, ExperimentKind::lemma1_grid},
      {lemma2, ExperimentKind::lemma2_range}, {sw, ExperimentKind::sw_surrogate}};
  for (const auto& [cmd, k] : kinds) {
    if (!cmd->parsed()) continue;
    auto c = to_config(f, k);
    if (smooth_exponent) c.smooth_exponent = plab::Rational::parse(*smooth_exponent);
    if (!nu.empty()) c.nu = plab::parse_rational_list(nu);
    if (!lengths.empty()) c.lengths = plab::parse_rational_list(lengths);
    if (!r_grid.empty()) c.r_grid = plab::parse_rational_list(r_grid);
    c.z0 = plab::Rational::parse(z0);
    c.denominator = denominator;
    c.enforce_smooth_part = !no_smooth;
    c.extra_out = extra;
    c.instances = instances;
    c.max_n = max_n;
    c.seed = static_cast<std::uint64_t>(seed);
    if (k == ExperimentKind::sw_surrogate && c.x.empty()) c.x = {10'000};
    if (k == ExperimentKind::lemma1_grid && c.x.empty()) c.x = {1'000'000};
    c.validate();
    const auto res = plab::run(c);
    if (k == ExperimentKind::lemma1_grid) {
      for (std::size_t i = 0; i < res.rows.size(); ++i) {
        std::cerr << "tuples checked: " << res.field(i, "tuples")
                  << ", counterexamples: " << res.field(i, "counterexamples") << "\n";
      }
    }
    return emit(res, c);
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return real_main(argc, argv);
  } catch (const plab::ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const plab::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const plab::OverflowError& e) {
    std::cerr << "overflow: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const plab::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  }
}
