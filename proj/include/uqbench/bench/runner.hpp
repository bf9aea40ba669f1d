#pragma once

#include "uqbench/bench/config.hpp"
#include "uqbench/bench/dataset.hpp"
#include "uqbench/bench/model_factory.hpp"
#include "uqbench/hpo/bayesopt.hpp"
#include "uqbench/metrics/calibration.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace uqb::bench {

/// Named metric values: nll, ce_reg, mae for regression; nll, ece, acc for
/// classification.
using MetricReport = std::map<std::string, double>;

struct EpochLoss {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

/// The dataset named by the config (synthetic data is generated).
Dataset load_dataset(const ExperimentConfig& config);

/// Adam over shuffled minibatches. The train loss of an epoch is the
/// row-weighted mean of its batch losses; the val loss is the loss on the
/// val rows after the epoch. A non-finite loss raises NumericError.
std::vector<EpochLoss> train(Model& model, const Partition& data, const ExperimentConfig& config,
                             std::uint64_t seed);

/// Metrics of `model` on rows `x` against standardized targets `y`;
/// regression is scored in raw target units.
MetricReport evaluate(Model& model, TaskKind task, const Partition& data, const Matrix& x,
                      const Vector& y, int bins, std::uint64_t seed,
                      std::vector<metrics::ReliabilityRow>* reliability = nullptr);

struct RunResult {
  MetricReport metrics;
  std::vector<EpochLoss> curve;
  std::vector<metrics::ReliabilityRow> reliability;
};

/// Train on the inner train rows, trace val loss on the inner val rows,
/// score on the test rows.
RunResult run_experiment(const ExperimentConfig& config, const Dataset& data);

struct ShiftRow {
  std::string model;
  std::uint64_t seed = 0;
  std::string kind;
  double severity = 0.0;
  std::string metric;
  double value = 0.0;
};

struct ShiftResult {
  std::vector<ShiftRow> rows;
  /// Unperturbed test metrics per run, in run order.
  std::vector<std::pair<std::uint64_t, MetricReport>> baselines;
};

/// config.shift_runs models, each trained from scratch with seed config.seed + r
/// on the same split, then scored on the test rows under every perturbation
/// kind and severity. Runs execute concurrently.
ShiftResult run_shift_experiment(const ExperimentConfig& config, const Dataset& data);

struct AblationRow {
  std::string model;
  std::string sweep;  ///< inducing | depth
  int value = 0;
  double nll = 0.0;
};

/// inducing: M in {32, 64, 128, 256, 512} with no hidden layers;
/// depth: d in {1, 2, 4, 8} width-1 hidden layers with M = 128.
/// Both at learning rate 0.01 for 20 epochs.
std::vector<AblationRow> run_ablation(const std::string& kind, const ExperimentConfig& config,
                                      const Dataset& data);

/// Search space for a model on a dataset.
hpo::SearchSpace tuning_space(const std::string& model, const std::string& dataset);

/// Writes a searched config back into an experiment config.
ExperimentConfig apply_trial(const ExperimentConfig& base, const hpo::SearchSpace& space,
                             const hpo::Config& trial);

/// BayesOpt on validation NLL.
hpo::TuneResult run_tuning(const ExperimentConfig& config, const Dataset& data,
                           const hpo::SearchSpace& space);

/// Architecture lists searched per dataset.
std::vector<std::vector<int>> gp_architectures(const std::string& dataset);

}  // namespace uqb::bench
