// uqbench: train, evaluate, tune, stress-test and ablate uncertainty models.

#include "uqbench/bench/io.hpp"
#include "uqbench/bench/runner.hpp"
#include "uqbench/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace uqb;
using namespace uqb::bench;

namespace {

struct Flags {
  std::string model;
  std::string dataset;
  std::string data;
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string ablation = "inducing";
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--model", f.model, "dgp | dspp | ensemble")
      ->check(CLI::IsMember({"dgp", "dspp", "ensemble"}));
  cmd->add_option("--dataset", f.dataset, "casp | esr | synthetic")
      ->check(CLI::IsMember({"casp", "esr", "synthetic"}));
  cmd->add_option("--data", f.data, "CSV file for casp or esr");
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--preset", f.preset, "named tuned config");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
}

// Preset, then config file, then flags.
ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig c = f.preset.empty() ? ExperimentConfig{} : preset(f.preset);
  if (!f.config.empty()) c = load_config_file(f.config, c);
  if (!f.model.empty()) c.model = f.model;
  if (!f.dataset.empty()) c.dataset = f.dataset;
  if (!f.data.empty()) c.data_path = f.data;
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  validate(c);
  return c;
}

void print_metrics(const MetricReport& m) {
  for (const auto& [name, value] : m) std::printf("%s %.6g\n", name.c_str(), value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty benchmark for deep GPs, sigma point processes and deep ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());
  Flags flags;
  CLI::App* train_cmd = app.add_subcommand("train", "train, score on the test split, write curves");
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score a seeded model on the test split");
  CLI::App* tune_cmd = app.add_subcommand("tune", "BayesOpt over the search space");
  CLI::App* shift_cmd = app.add_subcommand("shift", "perturbation runs over the severity schedule");
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "inducing-point or depth sweep");
  CLI::App* report_cmd = app.add_subcommand("report", "summarize results under --out");
  for (CLI::App* cmd : {train_cmd, eval_cmd, tune_cmd, shift_cmd, ablate_cmd}) add_common(cmd, flags);
  ablate_cmd->add_option("--kind", flags.ablation, "inducing | depth")
      ->check(CLI::IsMember({"inducing", "depth"}));
  report_cmd->add_option("--out", flags.out, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (report_cmd->parsed()) {
      std::cout << report(flags.out);
      return 0;
    }
    const ExperimentConfig c = resolve(flags);
    const Dataset data = load_dataset(c);
    if (train_cmd->parsed()) {
      const RunResult r = run_experiment(c, data);
      write_run(c.output_dir, c, r);
      print_metrics(r.metrics);
    } else if (eval_cmd->parsed()) {
      const RunResult r = run_experiment(c, data);
      write_text(std::filesystem::path(c.output_dir) / "metrics.json", metrics_json(c, r.metrics).dump(2) + "\n");
      write_text(std::filesystem::path(c.output_dir) / "reliability.csv",
                 metrics::reliability_csv(r.reliability) + csv_stamp(c));
      print_metrics(r.metrics);
    } else if (tune_cmd->parsed()) {
      const hpo::SearchSpace space = tuning_space(c.model, c.dataset);
      const hpo::TuneResult r = run_tuning(c, data, space);
      write_tuning(c.output_dir, c, space, r);
      std::printf("best validation nll %.6g at trial %d\n", r.best.objective, r.best.index);
    } else if (shift_cmd->parsed()) {
      const ShiftResult r = run_shift_experiment(c, data);
      write_shift(c.output_dir, c, r);
      std::printf("%zu rows\n", r.rows.size());
    } else if (ablate_cmd->parsed()) {
      const auto rows = run_ablation(flags.ablation, c, data);
      write_ablation(c.output_dir, c, flags.ablation, rows);
      for (const AblationRow& r : rows) std::printf("%s %d %.6g\n", r.sweep.c_str(), r.value, r.nll);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
