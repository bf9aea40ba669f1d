#pragma once

#include "uqbench/bench/runner.hpp"

#include <filesystem>
#include <string>

namespace uqb::bench {

/// Toolkit version stamped into every output.
std::string version();

/// The stamp line closing every CSV: `# config_hash=<h>,version=<v>`.
std::string csv_stamp(const ExperimentConfig& config);

std::string loss_curve_csv(const std::vector<EpochLoss>& curve);
std::string shift_results_csv(const std::vector<ShiftRow>& rows);
std::string ablation_csv(const std::vector<AblationRow>& rows);

nlohmann::json metrics_json(const ExperimentConfig& config, const MetricReport& metrics);
nlohmann::json trial_json(const ExperimentConfig& config, const hpo::SearchSpace& space,
                          const hpo::TrialRecord& trial);

/// Creates the directory and writes `text`; `stamp` lines are appended to CSVs.
void write_text(const std::filesystem::path& path, const std::string& text);

/// metrics.json, loss_curve.csv and reliability.csv under `dir`.
void write_run(const std::filesystem::path& dir, const ExperimentConfig& config, const RunResult& run);
/// shift_results.csv and baseline_metrics.json.
void write_shift(const std::filesystem::path& dir, const ExperimentConfig& config,
                 const ShiftResult& result);
/// trials.jsonl and best_config.json.
void write_tuning(const std::filesystem::path& dir, const ExperimentConfig& config,
                  const hpo::SearchSpace& space, const hpo::TuneResult& result);
void write_ablation(const std::filesystem::path& dir, const ExperimentConfig& config,
                    const std::string& kind, const std::vector<AblationRow>& rows);

/// Text summary of every metrics.json and shift_results.csv under `dir`:
/// metric values per run and the median per (model, kind, severity, metric).
std::string report(const std::filesystem::path& dir);

}  // namespace uqb::bench
