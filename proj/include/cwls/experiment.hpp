#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cwls/discrete_measure.hpp"
#include "cwls/multi_index.hpp"
#include "cwls/sampler.hpp"
#include "cwls/wls.hpp"

namespace cwls {

/// How the sample count M scales with the space dimension N.
struct MRule {
  enum class Kind { NLogN, Explicit, Linear };
  Kind kind = Kind::NLogN;
  std::vector<int> values;  // Explicit: one M per schedule entry
  double factor = 2.0;      // Linear: M = max(N, ceil(factor * N))

  int value_for(int N, int schedule_pos) const;
  std::string label() const;
};

struct ExperimentConfig {
  std::string domain_spec = "cube";
  std::string function_name = "f1";
  IndexSetKind set_kind = IndexSetKind::HyperbolicCross;
  int d = 2;
  std::vector<int> schedule;  // index-set orders, strictly increasing
  MethodKind method = MethodKind::Method1;
  int K = 20000;
  int T = 0;  // off-grid evaluation points; 0 disables E_tau_tilde
  MRule m_rule;
  std::vector<int> k_schedule;  // optional explicit k_t for method 2
  int trials = 10;
  std::uint64_t seed = 0;
  double delta = 0.5;
  double gamma = 0.01;
  std::string output;  // CSV path; empty keeps results in memory only
  bool timings = false;
  bool dump_grid = false;
  bool dump_ledger = false;  // method 2: write <output>.ledger_trial<i>.csv
  RankPolicy rank_policy = RankPolicy::Regenerate;
  std::optional<double> lambda_rect;
};

ExperimentConfig parse_config_string(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

/// One record of a sweep.  kind is "trial", "mean" (trial = -1) or "failed".
struct ResultRow {
  std::string method;
  int d = 0;
  std::string domain;
  std::string function;
  int N = 0;
  int M = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> E_tau;
  std::optional<double> E_tau_tilde;
  std::optional<double> C;
  std::optional<double> kappa;
  std::optional<double> wall_ms;
  std::string kind = "trial";
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::string summary_json;
  // Method 2 audit: per trial, the stage ledger plus the evaluation economy.
  std::vector<std::vector<Method2Stage>> trial_stages;
  long long distinct_f_evals = 0;
  long long distinct_drawn_indices = 0;
  int grid_retries = 0;
};

/// Run the configured sweep.  Deterministic for a fixed (config, seed); when
/// config.output is set, writes the CSV (plus <output>.summary.json and, if
/// requested, <output>.grid.csv).
SweepResult run_sweep(const ExperimentConfig& config);

struct ConditioningVariant {
  MethodKind method = MethodKind::Method1;
  MRule m_rule;
};

/// Fixed grid, several (method, M-rule) variants; rows carry
/// "<method>/<rule>" labels so the stability constant can be compared across
/// scalings.
SweepResult run_conditioning_sweep(const ExperimentConfig& base,
                                   const std::vector<ConditioningVariant>& variants);

/// Variants parsed from the config's "variants" array.
std::vector<ConditioningVariant> parse_variants(const std::string& json_text);

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_csv_file(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_csv(std::istream& is);
std::vector<ResultRow> read_csv_file(const std::string& path);

/// Generate gnuplot scripts, one per (domain, function) panel found in the
/// CSV's mean rows.  style: fig1 (E_tau vs M), fig3 (C vs N), fig6
/// (E_tau_tilde vs M); all with logarithmic error axes.  Returns the paths
/// written.
std::vector<std::string> emit_plots(const std::string& csv_path,
                                    const std::string& style,
                                    const std::string& out_dir);

}  // namespace cwls
