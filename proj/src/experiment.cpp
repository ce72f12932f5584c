#include "cwls/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cwls/diagnostics.hpp"
#include "cwls/errors.hpp"
#include "cwls/test_functions.hpp"

namespace cwls {

namespace {

// Stream-id layout: everything a sweep draws is a pure function of
// (config seed, role, variant, stage, trial), so results never depend on
// execution order.
constexpr std::uint64_t kGridStream = 1;
constexpr std::uint64_t kEvalGridStream = 2;

std::uint64_t draw_stream(int variant, int stage, int trial) {
  return (3ULL << 40) | (static_cast<std::uint64_t>(variant) << 32) |
         (static_cast<std::uint64_t>(stage) << 20) |
         static_cast<std::uint64_t>(trial);
}

std::uint64_t method2_stream(int variant, int trial) {
  return (4ULL << 40) | (static_cast<std::uint64_t>(variant) << 32) |
         static_cast<std::uint64_t>(trial);
}

}  // namespace

int MRule::value_for(int N, int schedule_pos) const {
  switch (kind) {
    case Kind::NLogN:
      return m_target_nlogn(N);
    case Kind::Explicit:
      if (schedule_pos < 0 || schedule_pos >= static_cast<int>(values.size()))
        throw ConfigError("explicit M rule is shorter than the schedule");
      return values[schedule_pos];
    case Kind::Linear:
      return static_cast<int>(
          std::max<long long>(N, static_cast<long long>(std::ceil(factor * N))));
  }
  return N;
}

std::string MRule::label() const {
  switch (kind) {
    case Kind::NLogN: return "nlogn";
    case Kind::Explicit: return "explicit";
    case Kind::Linear: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%gN", factor);
      return buf;
    }
  }
  return "?";
}

namespace {

using nlohmann::json;

MRule m_rule_from_json(const json& j) {
  MRule rule;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nlogn") return rule;
    throw ConfigError("unknown M rule '" + s + "'");
  }
  const std::string type = j.value("type", "nlogn");
  if (type == "nlogn") {
    rule.kind = MRule::Kind::NLogN;
  } else if (type == "explicit") {
    rule.kind = MRule::Kind::Explicit;
    rule.values = j.at("values").get<std::vector<int>>();
  } else if (type == "linear") {
    rule.kind = MRule::Kind::Linear;
    rule.factor = j.at("c").get<double>();
    if (rule.factor < 1.0) throw ConfigError("linear M rule needs c >= 1");
  } else {
    throw ConfigError("unknown M rule type '" + type + "'");
  }
  return rule;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.domain_spec = j.value("domain", cfg.domain_spec);
  cfg.function_name = j.value("function", cfg.function_name);
  if (j.contains("index_set")) {
    const IndexFamily fam = parse_index_family(j.at("index_set").get<std::string>());
    cfg.set_kind = fam.kind;
    cfg.d = fam.d;
  }
  if (j.contains("schedule")) {
    cfg.schedule = j.at("schedule").get<std::vector<int>>();
    for (std::size_t i = 1; i < cfg.schedule.size(); ++i)
      if (cfg.schedule[i] <= cfg.schedule[i - 1])
        throw ConfigError("schedule orders must be strictly increasing");
  }
  if (j.contains("method"))
    cfg.method = method_kind_from_string(j.at("method").get<std::string>());
  cfg.K = j.value("K", cfg.K);
  cfg.T = j.value("T", cfg.T);
  if (j.contains("M_rule")) cfg.m_rule = m_rule_from_json(j.at("M_rule"));
  if (j.contains("k_schedule"))
    cfg.k_schedule = j.at("k_schedule").get<std::vector<int>>();
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.output = j.value("output", cfg.output);
  cfg.timings = j.value("timings", cfg.timings);
  cfg.dump_grid = j.value("dump_grid", cfg.dump_grid);
  cfg.dump_ledger = j.value("dump_ledger", cfg.dump_ledger);
  if (j.contains("rank_policy")) {
    const std::string policy = j.at("rank_policy").get<std::string>();
    if (policy == "regenerate") cfg.rank_policy = RankPolicy::Regenerate;
    else if (policy == "grow") cfg.rank_policy = RankPolicy::GrowGrid;
    else throw ConfigError("unknown rank policy '" + policy + "'");
  }
  if (j.contains("lambda_rect"))
    cfg.lambda_rect = j.at("lambda_rect").get<double>();
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.schedule.empty()) throw ConfigError("schedule must not be empty");
  for (std::size_t i = 1; i < cfg.schedule.size(); ++i)
    if (cfg.schedule[i] <= cfg.schedule[i - 1])
      throw ConfigError("schedule orders must be strictly increasing");
  if (cfg.schedule.front() < 0) throw ConfigError("orders must be >= 0");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.K < 1) throw ConfigError("K must be >= 1");
  if (cfg.T < 0) throw ConfigError("T must be >= 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw ConfigError("delta must lie in (0, 1)");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw ConfigError("gamma must lie in (0, 1)");
  if (!cfg.k_schedule.empty()) {
    if (cfg.k_schedule.size() != cfg.schedule.size())
      throw ConfigError("k_schedule must match the schedule length");
    for (std::size_t i = 0; i < cfg.k_schedule.size(); ++i) {
      if (cfg.k_schedule[i] < 1) throw ConfigError("k_t must be >= 1");
      if (i > 0 && cfg.k_schedule[i] < cfg.k_schedule[i - 1])
        throw ConfigError("k_schedule must be nondecreasing");
    }
  }
}

}  // namespace

ExperimentConfig parse_config_string(const std::string& json_text) {
  return config_from_json(parse_json_text(json_text));
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_string(buffer.str());
}

std::vector<ConditioningVariant> parse_variants(const std::string& json_text) {
  const json j = parse_json_text(json_text);
  if (!j.contains("variants") || !j.at("variants").is_array() ||
      j.at("variants").empty())
    throw ConfigError("conditioning config needs a non-empty 'variants' array");
  std::vector<ConditioningVariant> variants;
  for (const auto& v : j.at("variants")) {
    ConditioningVariant variant;
    variant.method = method_kind_from_string(v.at("method").get<std::string>());
    if (v.contains("M_rule")) variant.m_rule = m_rule_from_json(v.at("M_rule"));
    variants.push_back(std::move(variant));
  }
  return variants;
}

namespace {

struct StageContext {
  MultiIndexSet set;
  TensorLegendreBasis basis;
  int N = 0;
};

struct BoundTarget {
  TargetFunction target;
  Eigen::VectorXd grid_values;
  Eigen::VectorXd eval_values;  // empty when T = 0
};

double millis_between(std::chrono::steady_clock::time_point a,
                      std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

void dump_grid_csv(const KGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  for (int k = 0; k < grid.dimension(); ++k) out << (k ? "," : "") << "y" << k;
  out << "\n";
  char buf[64];
  for (int i = 0; i < grid.size(); ++i) {
    for (int k = 0; k < grid.dimension(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", grid.points(i, k));
      out << (k ? "," : "") << buf;
    }
    out << "\n";
  }
}

void append_mean_rows(std::vector<ResultRow>& rows) {
  std::vector<std::pair<std::string, int>> keys;
  for (const auto& row : rows) {
    if (row.kind != "trial") continue;
    const std::pair<std::string, int> key{row.method, row.N};
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
  }
  std::vector<ResultRow> means;
  for (const auto& [method, N] : keys) {
    ResultRow mean;
    int count = 0;
    bool any_tt = false, any_wall = false;
    double e_tau = 0, e_tt = 0, c = 0, kappa = 0, wall = 0;
    for (const auto& row : rows) {
      if (row.kind != "trial" || row.method != method || row.N != N) continue;
      if (count == 0) mean = row;
      ++count;
      e_tau += row.E_tau.value_or(0.0);
      if (row.E_tau_tilde) {
        any_tt = true;
        e_tt += *row.E_tau_tilde;
      }
      c += row.C.value_or(0.0);
      kappa += row.kappa.value_or(0.0);
      if (row.wall_ms) {
        any_wall = true;
        wall += *row.wall_ms;
      }
    }
    if (count == 0) continue;
    mean.trial = -1;
    mean.kind = "mean";
    mean.E_tau = e_tau / count;
    mean.E_tau_tilde = any_tt ? std::optional<double>(e_tt / count) : std::nullopt;
    mean.C = c / count;
    mean.kappa = kappa / count;
    mean.wall_ms = any_wall ? std::optional<double>(wall / count) : std::nullopt;
    means.push_back(std::move(mean));
  }
  rows.insert(rows.end(), means.begin(), means.end());
}

class SweepEngine {
public:
  SweepEngine(const ExperimentConfig& cfg, std::vector<ConditioningVariant> variants,
              bool labeled)
      : cfg_(cfg), variants_(std::move(variants)), labeled_(labeled) {}

  SweepResult run() {
    validate_config(cfg_);

    domain_ = parse_domain(cfg_.domain_spec, cfg_.d);
    proto_ = builtin_function(cfg_.function_name, cfg_.d);
    if (!proto_.needs_space) enforce_domain_pairing(proto_, domain_);

    for (int order : cfg_.schedule) {
      MultiIndexSet set = make_index_set(cfg_.set_kind, cfg_.d, order);
      TensorLegendreBasis basis(set);
      const int n = set.size();
      stages_.push_back({std::move(set), std::move(basis), n});
    }
    if (cfg_.K < stages_.back().N)
      throw ConfigError("K must be at least the largest space dimension N");

    RngStream grid_rng(cfg_.seed, kGridStream);
    GridFactorization gf = build_factorization(domain_, cfg_.K,
                                               stages_.front().basis, grid_rng,
                                               cfg_.rank_policy);
    result_.grid_retries = gf.retries;
    grid_ = std::move(gf.grid);
    first_fact_ = std::move(gf.factorization);

    if (cfg_.T > 0) {
      RngStream eval_rng(cfg_.seed, kEvalGridStream);
      eval_grid_ = make_eval_grid(domain_, cfg_.T, eval_rng);
    }

    for (std::size_t v = 0; v < variants_.size(); ++v) {
      const std::string label =
          labeled_ ? to_string(variants_[v].method) + "/" + variants_[v].m_rule.label()
                   : to_string(variants_[v].method);
      if (variants_[v].method == MethodKind::Method2)
        run_method2(static_cast<int>(v), label);
      else
        run_per_stage(static_cast<int>(v), label);
    }

    for (const auto& row : result_.rows) method_rank(row.method);
    std::stable_sort(result_.rows.begin(), result_.rows.end(),
                     [this](const ResultRow& a, const ResultRow& b) {
                       const int ma = method_rank(a.method);
                       const int mb = method_rank(b.method);
                       if (ma != mb) return ma < mb;
                       if (a.N != b.N) return a.N < b.N;
                       return a.trial < b.trial;
                     });
    append_mean_rows(result_.rows);
    finalize();
    return std::move(result_);
  }

private:
  // ---- shared pieces ----

  ResultRow base_row(const std::string& label, int N, int M, int trial) const {
    ResultRow row;
    row.method = label;
    row.d = cfg_.d;
    row.domain = cfg_.domain_spec;
    row.function = cfg_.function_name;
    row.N = N;
    row.M = M;
    row.trial = trial;
    row.seed = cfg_.seed;
    return row;
  }

  int method_rank(const std::string& method) {
    const auto it = std::find(method_order_.begin(), method_order_.end(), method);
    if (it != method_order_.end())
      return static_cast<int>(it - method_order_.begin());
    method_order_.push_back(method);
    return static_cast<int>(method_order_.size()) - 1;
  }

  // Bind the configured target for a stage.  in_space targets are redrawn per
  // stage in the current space for method1/uniform and pinned to the first
  // stage's space for method2, where recycling requires a fixed f.
  BoundTarget bind_target(const OrthoFactorization& fact, const StageContext& stage,
                          bool method2) {
    BoundTarget out;
    if (proto_.needs_space) {
      const std::uint64_t fseed =
          proto_.in_space_seed != 0 ? proto_.in_space_seed : cfg_.seed ^ 0x1B873593ULL;
      if (method2) {
        out.target = make_in_space(first_fact_, stages_.front().basis, fseed);
        out.grid_values = evaluate_on_grid(first_fact_, out.target.coefficients);
      } else {
        out.target = make_in_space(fact, stage.basis, fseed);
        out.grid_values = evaluate_on_grid(fact, out.target.coefficients);
      }
    } else {
      out.target = proto_;
      if (proto_grid_values_.size() == 0)
        proto_grid_values_ = proto_.values(grid_.points);
      out.grid_values = proto_grid_values_;
    }
    if (eval_grid_) out.eval_values = out.target.values(eval_grid_->points);
    return out;
  }

  void fill_row(ResultRow& row, const SolveResult& sol, const OrthoFactorization& fact,
                const StageContext& stage, const BoundTarget& bound) {
    row.C = 1.0 / sol.sigma_min;
    row.kappa = sol.sigma_max / sol.sigma_min;
    row.E_tau = error_on_grid(bound.grid_values, evaluate_on_grid(fact, sol.c));
    if (eval_grid_)
      row.E_tau_tilde = relative_l2_error(
          bound.eval_values,
          evaluate_many(fact, stage.basis, sol.c, eval_grid_->points));
  }

  void mark_remaining_failed(const std::string& label, std::size_t from_stage,
                             const ConditioningVariant& variant) {
    for (std::size_t t = from_stage; t < stages_.size(); ++t) {
      const int M = variant.m_rule.value_for(stages_[t].N, static_cast<int>(t));
      for (int trial = 0; trial < cfg_.trials; ++trial) {
        ResultRow row = base_row(label, stages_[t].N, M, trial);
        row.kind = "failed";
        result_.rows.push_back(std::move(row));
      }
    }
  }

  // ---- method 1 / uniform: independent fits per (stage, trial) ----

  void run_per_stage(int variant_idx, const std::string& label) {
    const ConditioningVariant& variant = variants_[variant_idx];
    OrthoFactorization fact = first_fact_;
    for (std::size_t t = 0; t < stages_.size(); ++t) {
      const StageContext& stage = stages_[t];
      if (fact.size() < stage.N) {
        try {
          fact = extend_factorization(std::move(fact), grid_, stage.basis);
        } catch (const FullRankFailure&) {
          mark_remaining_failed(label, t, variant);
          return;
        }
      }
      const int M = variant.m_rule.value_for(stage.N, static_cast<int>(t));
      const BoundTarget bound = bind_target(fact, stage, /*method2=*/false);
      for (int trial = 0; trial < cfg_.trials; ++trial) {
        ResultRow row = base_row(label, stage.N, M, trial);
        const auto start = std::chrono::steady_clock::now();
        try {
          RngStream rng(cfg_.seed, draw_stream(variant_idx, static_cast<int>(t), trial));
          Eigen::MatrixXd A;
          Eigen::VectorXd b;
          if (variant.method == MethodKind::Method1) {
            const Method1Plan plan = make_method1_plan(fact, M, rng);
            Eigen::VectorXd fvals(M);
            for (int j = 0; j < M; ++j) fvals(j) = bound.grid_values(plan.indices[j]);
            std::tie(A, b) = assemble_method1(fact, plan, fvals);
          } else {
            std::vector<int> indices(M);
            const int K = grid_.size();
            for (int j = 0; j < M; ++j)
              indices[j] = std::min(K - 1, static_cast<int>(rng.uniform01() * K));
            Eigen::VectorXd fvals(M);
            for (int j = 0; j < M; ++j) fvals(j) = bound.grid_values(indices[j]);
            std::tie(A, b) = assemble_uniform(fact, indices, fvals);
          }
          const SolveResult sol = solve(A, b);
          fill_row(row, sol, fact, stage, bound);
          if (cfg_.timings)
            row.wall_ms = millis_between(start, std::chrono::steady_clock::now());
        } catch (const SolveFailure&) {
          row.kind = "failed";
        }
        result_.rows.push_back(std::move(row));
      }
    }
  }

  // ---- method 2: adaptive passes, all trials advanced stage by stage so
  // the nested factorization is built exactly once ----

  void run_method2(int variant_idx, const std::string& label) {
    const ConditioningVariant& variant = variants_[variant_idx];
    const BoundTarget bound = bind_target(first_fact_, stages_.front(), true);

    std::vector<Method2Plan> plans(cfg_.trials);
    std::vector<RngStream> rngs;
    rngs.reserve(cfg_.trials);
    for (int trial = 0; trial < cfg_.trials; ++trial)
      rngs.emplace_back(cfg_.seed, method2_stream(variant_idx, trial));
    // Which grid indices each trial's solver requested f at (the cache audit).
    std::vector<std::unordered_set<int>> requested(cfg_.trials);

    OrthoFactorization fact = first_fact_;
    for (std::size_t t = 0; t < stages_.size(); ++t) {
      const StageContext& stage = stages_[t];
      if (fact.size() < stage.N) {
        try {
          fact = extend_factorization(std::move(fact), grid_, stage.basis);
        } catch (const FullRankFailure&) {
          mark_remaining_failed(label, t, variant);
          break;
        }
      }
      for (int trial = 0; trial < cfg_.trials; ++trial) {
        Method2Plan& plan = plans[trial];
        int k_t;
        if (!cfg_.k_schedule.empty()) {
          k_t = cfg_.k_schedule[t];
        } else {
          const int m = variant.m_rule.value_for(stage.N, static_cast<int>(t));
          k_t = std::max(plan.current_k(), (m + stage.N - 1) / stage.N);
          k_t = std::max(k_t, 1);
        }
        const auto start = std::chrono::steady_clock::now();
        plan = method2_advance(std::move(plan), fact, k_t, rngs[trial]);
        const std::vector<int> indices = plan.indices();
        Eigen::VectorXd fvals(indices.size());
        for (std::size_t j = 0; j < indices.size(); ++j) {
          requested[trial].insert(indices[j]);
          fvals(j) = bound.grid_values(indices[j]);
        }
        ResultRow row = base_row(label, stage.N, plan.current_M(), trial);
        try {
          auto [A, b] = assemble_method2(fact, plan, fvals);
          const SolveResult sol = solve(A, b);
          fill_row(row, sol, fact, stage, bound);
          if (cfg_.timings)
            row.wall_ms = millis_between(start, std::chrono::steady_clock::now());
        } catch (const SolveFailure&) {
          row.kind = "failed";
        }
        result_.rows.push_back(std::move(row));
      }
    }

    for (int trial = 0; trial < cfg_.trials; ++trial) {
      if (plans[trial].empty()) continue;
      if (cfg_.dump_ledger && !cfg_.output.empty()) {
        std::ofstream ledger(cfg_.output + ".ledger_trial" +
                             std::to_string(trial) + ".csv");
        if (ledger) write_ledger_csv(plans[trial], ledger);
      }
      result_.trial_stages.push_back(plans[trial].stages());
      const std::vector<int> indices = plans[trial].indices();
      const std::unordered_set<int> drawn(indices.begin(), indices.end());
      result_.distinct_drawn_indices += static_cast<long long>(drawn.size());
      result_.distinct_f_evals += static_cast<long long>(requested[trial].size());
    }
  }

  // ---- summary + files ----

  void finalize() {
    json summary;
    summary["domain"] = cfg_.domain_spec;
    summary["function"] = cfg_.function_name;
    summary["index_set"] = to_string(cfg_.set_kind) + ":d=" + std::to_string(cfg_.d);
    summary["schedule"] = cfg_.schedule;
    summary["K"] = cfg_.K;
    summary["T"] = cfg_.T;
    summary["trials"] = cfg_.trials;
    summary["seed"] = cfg_.seed;
    summary["grid_retries"] = result_.grid_retries;

    json stages = json::array();
    for (std::size_t t = 0; t < stages_.size(); ++t) {
      DiagnosticsReport report =
          make_report(stages_[t].N, cfg_.delta, cfg_.gamma, cfg_.lambda_rect);
      json stage;
      stage["order"] = cfg_.schedule[t];
      stage["N"] = stages_[t].N;
      stage["theory"] = report.theory;
      for (const auto& note : report.notes) stage["notes"].push_back(note);
      stages.push_back(std::move(stage));
    }
    summary["stages"] = std::move(stages);

    json means = json::array();
    for (const auto& row : result_.rows) {
      if (row.kind != "mean") continue;
      json m;
      m["method"] = row.method;
      m["N"] = row.N;
      m["M"] = row.M;
      if (row.E_tau) m["E_tau"] = *row.E_tau;
      if (row.E_tau_tilde) m["E_tau_tilde"] = *row.E_tau_tilde;
      if (row.C) m["C"] = *row.C;
      if (row.kappa) m["kappa"] = *row.kappa;
      means.push_back(std::move(m));
    }
    summary["means"] = std::move(means);

    if (result_.distinct_f_evals > 0) {
      summary["method2_audit"] = {
          {"distinct_f_evals", result_.distinct_f_evals},
          {"distinct_drawn_indices", result_.distinct_drawn_indices}};
    }

    int failed = 0;
    for (const auto& row : result_.rows)
      if (row.kind == "failed") ++failed;
    summary["failed_rows"] = failed;

    result_.summary_json = summary.dump(2);

    if (!cfg_.output.empty()) {
      write_csv_file(result_.rows, cfg_.output);
      std::ofstream sj(cfg_.output + ".summary.json");
      if (!sj)
        throw ConfigError("cannot open '" + cfg_.output + ".summary.json'");
      sj << result_.summary_json << "\n";
      if (cfg_.dump_grid) dump_grid_csv(grid_, cfg_.output + ".grid.csv");
    }
  }

  const ExperimentConfig& cfg_;
  std::vector<ConditioningVariant> variants_;
  bool labeled_;

  Domain domain_;
  TargetFunction proto_;
  Eigen::VectorXd proto_grid_values_;
  std::vector<StageContext> stages_;
  KGrid grid_;
  OrthoFactorization first_fact_;
  std::optional<EvalGrid> eval_grid_;
  std::vector<std::string> method_order_;
  SweepResult result_;
};

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  SweepEngine engine(config, {{config.method, config.m_rule}}, false);
  return engine.run();
}

SweepResult run_conditioning_sweep(const ExperimentConfig& base,
                                   const std::vector<ConditioningVariant>& variants) {
  if (variants.empty())
    throw ConfigError("conditioning sweep needs at least one variant");
  SweepEngine engine(base, variants, true);
  return engine.run();
}

}  // namespace cwls
