#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace uqb::bench {

struct ExperimentConfig {
  std::string model = "dspp";          ///< dgp | dspp | ensemble
  std::string dataset = "synthetic";   ///< casp | esr | synthetic
  std::string data_path;               ///< CSV for casp and esr
  std::string synthetic_task = "regression";  ///< regression | classification
  int synthetic_size = 500;
  bool check_dataset_size = true;

  double learning_rate = 0.01;
  int epochs = 20;
  int batch_size = 256;
  /// GP hidden layer widths, or the ensemble's MLP widths ([128, 64] when
  /// left empty for an ensemble).
  std::vector<int> architecture;
  int num_inducing = 128;
  int num_models = 5;
  int mc_samples = 10;
  int quadrature_sites = 8;
  double beta = 1.0;

  std::uint64_t seed = 0;
  int shift_runs = 5;
  bool severity_schedule = true;
  int calibration_bins = 10;
  int tuning_trials = 20;
  int tuning_init = 5;
  std::string output_dir = "out";
};

/// Fills a config from JSON on top of `base`; unknown keys and wrong types
/// raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::json to_json(const ExperimentConfig& config);

/// Checks enumerations and ranges; raises ConfigError.
void validate(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over the canonical JSON, output directory excluded.
std::string config_hash(const ExperimentConfig& config);

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// Named configs: the tuned settings per model and dataset.
std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

}  // namespace uqb::bench
