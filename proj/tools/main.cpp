#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cwls/errors.hpp"
#include "cwls/experiment.hpp"
#include "cwls/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cwls::ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void apply_overrides(cwls::ExperimentConfig& cfg, bool seed_set,
                     std::uint64_t seed, const std::string& out_dir) {
  if (seed_set) cfg.seed = seed;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string name =
        cfg.output.empty() ? "results.csv"
                           : std::filesystem::path(cfg.output).filename().string();
    cfg.output = (std::filesystem::path(out_dir) / name).string();
  }
}

void print_summary(const cwls::SweepResult& result) {
  int trial_rows = 0, failed = 0;
  for (const auto& row : result.rows) {
    if (row.kind == "trial") ++trial_rows;
    if (row.kind == "failed") ++failed;
  }
  std::cout << "rows: " << trial_rows << " trials, " << failed << " failed\n";
  for (const auto& row : result.rows) {
    if (row.kind != "mean") continue;
    std::cout << "mean " << row.method << " N=" << row.N << " M=" << row.M;
    if (row.E_tau) std::cout << " E_tau=" << *row.E_tau;
    if (row.E_tau_tilde) std::cout << " E_tau_tilde=" << *row.E_tau_tilde;
    if (row.C) std::cout << " C=" << *row.C;
    if (row.kappa) std::cout << " kappa=" << *row.kappa;
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cwls - weighted least-squares approximation on irregular domains with "
      "discrete Christoffel sampling"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite, csv_path, style = "fig1";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* sweep = app.add_subcommand("sweep", "run a configured error sweep");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  add_seed(sweep);
  sweep->add_option("--out", out_dir, "output directory for the CSV");

  CLI::App* conditioning = app.add_subcommand(
      "conditioning", "sweep the stability constant across (method, M-rule) variants");
  conditioning->add_option("--config", config_path, "JSON config file")->required();
  add_seed(conditioning);
  conditioning->add_option("--out", out_dir, "output directory for the CSV");

  CLI::App* validate = app.add_subcommand("validate", "run a validation suite");
  validate
      ->add_option("--suite", suite,
                   "orthonormality|distributions|recovery|chernoff|oracle")
      ->required();

  CLI::App* plot = app.add_subcommand("plot", "emit gnuplot scripts from a sweep CSV");
  plot->add_option("--csv", csv_path, "sweep CSV file")->required();
  plot->add_option("--style", style, "fig1|fig3|fig6");
  plot->add_option("--out", out_dir, "output directory for the scripts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (sweep->parsed()) {
      cwls::ExperimentConfig cfg = cwls::parse_config_file(config_path);
      apply_overrides(cfg, seed_set, seed, out_dir);
      const cwls::SweepResult result = cwls::run_sweep(cfg);
      print_summary(result);
      if (!cfg.output.empty())
        std::cout << "wrote " << cfg.output << " and " << cfg.output
                  << ".summary.json\n";
      return kExitOk;
    }
    if (conditioning->parsed()) {
      cwls::ExperimentConfig cfg = cwls::parse_config_file(config_path);
      const auto variants = cwls::parse_variants(read_file(config_path));
      apply_overrides(cfg, seed_set, seed, out_dir);
      const cwls::SweepResult result = cwls::run_conditioning_sweep(cfg, variants);
      print_summary(result);
      if (!cfg.output.empty())
        std::cout << "wrote " << cfg.output << " and " << cfg.output
                  << ".summary.json\n";
      return kExitOk;
    }
    if (validate->parsed()) {
      const cwls::ValidationReport report = cwls::run_validation(suite);
      std::cout << report.to_json() << "\n";
      return report.passed ? kExitOk : kExitValidationFailure;
    }
    if (plot->parsed()) {
      const auto paths = cwls::emit_plots(csv_path, style, out_dir);
      for (const auto& path : paths) std::cout << "wrote " << path << "\n";
      return kExitOk;
    }
  } catch (const cwls::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const cwls::FullRankFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const cwls::SolveFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const cwls::SamplingError& e) {
    std::cerr << "sampling failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const cwls::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
  return kExitOk;
}
