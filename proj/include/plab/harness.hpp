#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plab/rational.hpp"

namespace plab {

enum class ExperimentKind { sum5, sum6, bv, boxes_identity, lemma1_grid, lemma2_range, classify, sw_surrogate };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Flat key = value configuration; rationals are written p/q.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sum5;
  std::vector<std::int64_t> x;
  int k = 4;
  Rational theta{1, 2};
  Rational varpi{1, 20};
  Rational eps{1, 100};
  Rational rho{1, 10};
  std::int64_t a = 1;
  bool squarefree = true;
  std::optional<Rational> smooth_exponent;  // default 1/8 - 4 varpi
  std::optional<Rational> lower_exponent;
  std::vector<Rational> nu;       // sum6 (N_i = x^nu_i) and classify
  std::vector<Rational> lengths;  // sum6 explicit N_i, overrides nu
  std::int64_t denominator = 40;  // lemma1-grid
  std::vector<Rational> r_grid;   // lemma2-range; empty means the default 8-point grid
  Rational z0{2};                 // lemma2-range
  bool enforce_smooth_part = true;
  std::int64_t instances = 200;  // sw-surrogate
  std::int64_t max_n = 10'000;   // sw-surrogate
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;        // main CSV
  std::string svg;        // decay plot for sum experiments
  std::string extra_out;  // per-instance CSV (lemma2 instances, lemma1 witnesses)

  void validate() const;
  std::string serialize() const;
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ResultRow {
  std::vector<std::string> fields;
  double wall_seconds = 0.0;  // reported, never serialized
};

struct RunResult {
  ExperimentKind kind = ExperimentKind::sum5;
  std::vector<std::string> header;
  std::vector<ResultRow> rows;
  std::vector<std::string> extra_header;
  std::vector<std::vector<std::string>> extra_rows;
  bool verification_failed = false;

  std::string csv() const;
  std::string extra_csv() const;
  // Column lookup by name on row i.
  const std::string& field(std::size_t row, const std::string& column) const;
};

// Runs the experiment and writes config.out / config.svg / config.extra_out
// when set. Output is independent of config.workers.
RunResult run(const ExperimentConfig& config);

struct CompareReport {
  std::vector<std::string> diffs;
  bool identical() const noexcept { return diffs.empty(); }
};

// Exact columns compare as strings; float columns to 12 significant digits.
CompareReport snapshot_compare(const std::string& current_csv, const std::string& golden_csv);
bool is_float_column(const std::string& name);

// Self-contained log-log plot of sum/x against x with the two envelopes.
std::string decay_svg(const std::string& title, const std::vector<double>& xs, const std::vector<double>& sum_over_x);

// The reference parameter set evaluated at x, to show how far literal scale is.
std::string reference_parameters_report(double x);

std::string write_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::string& text);

}  // namespace plab
