#include "uqbench/bench/runner.hpp"

#include "uqbench/diff/adam.hpp"
#include "uqbench/errors.hpp"
#include "uqbench/shift/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <sstream>

namespace uqb::bench {

namespace {

std::string arch_label(const std::vector<int>& arch) {
  std::ostringstream s;
  s << '[';
  for (std::size_t i = 0; i < arch.size(); ++i) s << (i ? "," : "") << arch[i];
  s << ']';
  return s.str();
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& c) {
  if (c.dataset == "casp") return load_casp(c.data_path, c.seed, c.check_dataset_size);
  if (c.dataset == "esr") return load_esr(c.data_path, c.seed, c.check_dataset_size);
  if (c.synthetic_task == "classification") return synthetic_classification(c.synthetic_size, c.seed);
  return synthetic_regression(c.synthetic_size, c.seed);
}

std::vector<EpochLoss> train(Model& model, const Partition& data, const ExperimentConfig& c,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  diff::Adam adam(model.parameters(), c.learning_rate);
  const Eigen::Index n = data.x_train.rows();
  const auto n_total = static_cast<double>(n);
  Indices order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const std::uint64_t val_seed = rng();

  std::vector<EpochLoss> curve;
  for (int epoch = 1; epoch <= c.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(c.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(c.batch_size));
      const Indices batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                          order.begin() + static_cast<std::ptrdiff_t>(end));
      diff::Tape tape;
      const diff::Var loss =
          model.loss(tape, take_rows(data.x_train, batch), take_rows(data.y_train, batch), n_total, rng);
      const double value = loss.value()(0, 0);
      if (!std::isfinite(value)) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                           ": non-finite loss");
      }
      total += value * static_cast<double>(batch.size());
      adam.zero_grad();
      tape.backward(loss);
      adam.step();
    }
    diff::Tape val_tape(false);
    std::mt19937_64 val_rng(val_seed);
    const double val = model.loss(val_tape, data.x_val, data.y_val, n_total, val_rng).value()(0, 0);
    curve.push_back({epoch, total / n_total, val});
  }
  return curve;
}

MetricReport evaluate(Model& model, TaskKind task, const Partition& data, const Matrix& x,
                      const Vector& y, int bins, std::uint64_t seed,
                      std::vector<metrics::ReliabilityRow>* reliability) {
  const models::Prediction raw = model.predict(x, seed);
  MetricReport report;
  if (task == TaskKind::kClassification) {
    const auto& probs = std::get<models::CategoricalPrediction>(raw).probs;
    std::vector<int> labels(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(y(i));
    report["nll"] = metrics::nll_classification(probs, labels);
    report["ece"] = metrics::ece_classification(probs, labels, bins).ece;
    report["acc"] = metrics::accuracy(probs, labels);
    if (reliability) *reliability = metrics::reliability_curve(probs, labels, bins);
    return report;
  }
  const models::Prediction pred = models::unstandardize(raw, data.target_shift, data.target_scale);
  const Vector y_raw = (y.array() * data.target_scale + data.target_shift).matrix();
  report["nll"] = metrics::nll_regression(pred, y_raw);
  models::GaussianPrediction g;
  if (const auto* m = std::get_if<models::MixturePrediction>(&pred)) g = models::moment_match(*m);
  else g = std::get<models::GaussianPrediction>(pred);
  const Vector sd = g.var.cwiseMax(1e-300).cwiseSqrt();
  report["ce_reg"] = metrics::regression_calibration(g.mean, sd, y_raw, bins).error;
  report["mae"] = metrics::mae(g.mean, y_raw);
  if (reliability) *reliability = metrics::reliability_curve(g.mean, sd, y_raw, bins);
  return report;
}

RunResult run_experiment(const ExperimentConfig& c, const Dataset& data) {
  const Partition part = make_partition(data);
  auto model = make_model(c, data.task, data.num_classes, part.x_train, mix(c.seed, 1));
  RunResult r;
  r.curve = train(*model, part, c, mix(c.seed, 2));
  r.metrics = evaluate(*model, data.task, part, part.x_test, part.y_test, c.calibration_bins,
                       mix(c.seed, 3), &r.reliability);
  return r;
}

ShiftResult run_shift_experiment(const ExperimentConfig& c, const Dataset& data) {
  const Partition part = make_partition(data);
  std::vector<double> severities{0.0};
  if (c.severity_schedule) {
    const auto& s = shift::severity_schedule();
    severities.assign(s.begin(), s.end());
  }

  struct RunOutput {
    MetricReport baseline;
    std::vector<ShiftRow> rows;
  };
  auto one_run = [&](std::uint64_t run_seed) {
    auto model = make_model(c, data.task, data.num_classes, part.x_train, mix(run_seed, 1));
    train(*model, part, c, mix(run_seed, 2));
    const std::uint64_t eval_seed = mix(run_seed, 3);
    RunOutput out;
    out.baseline = evaluate(*model, data.task, part, part.x_test, part.y_test, c.calibration_bins, eval_seed);
    for (shift::PerturbationKind kind : shift::kAllPerturbations) {
      for (std::size_t k = 0; k < severities.size(); ++k) {
        shift::PerturbationSpec spec{kind, severities[k], mix(run_seed, 100 + 10 * static_cast<int>(kind) + k),
                                     part.feature_stds};
        const Matrix x = shift::perturb(part.x_test, spec);
        const MetricReport m = evaluate(*model, data.task, part, x, part.y_test, c.calibration_bins, eval_seed);
        for (const auto& [metric, value] : m) {
          out.rows.push_back({c.model, run_seed, std::string(shift::to_string(kind)), severities[k], metric, value});
        }
      }
    }
    return out;
  };

  std::vector<std::future<RunOutput>> futures;
  for (int r = 0; r < c.shift_runs; ++r) {
    futures.push_back(std::async(std::launch::async, one_run, c.seed + static_cast<std::uint64_t>(r)));
  }
  ShiftResult result;
  for (int r = 0; r < c.shift_runs; ++r) {
    RunOutput out = futures[static_cast<std::size_t>(r)].get();
    result.baselines.emplace_back(c.seed + static_cast<std::uint64_t>(r), std::move(out.baseline));
    result.rows.insert(result.rows.end(), out.rows.begin(), out.rows.end());
  }
  return result;
}

std::vector<AblationRow> run_ablation(const std::string& kind, const ExperimentConfig& config,
                                      const Dataset& data) {
  if (config.model != "dgp" && config.model != "dspp") {
    throw ConfigError("ablations apply to dgp and dspp only");
  }
  std::vector<int> values;
  if (kind == "inducing") values = {32, 64, 128, 256, 512};
  else if (kind == "depth") values = {1, 2, 4, 8};
  else throw ConfigError("ablation kind must be inducing or depth, got '" + kind + "'");

  std::vector<AblationRow> rows;
  for (int v : values) {
    ExperimentConfig c = config;
    c.learning_rate = 0.01;
    c.epochs = 20;
    if (kind == "inducing") {
      c.num_inducing = v;
      c.architecture.clear();
    } else {
      c.num_inducing = 128;
      c.architecture.assign(static_cast<std::size_t>(v), 1);
    }
    rows.push_back({c.model, kind, v, run_experiment(c, data).metrics.at("nll")});
  }
  return rows;
}

std::vector<std::vector<int>> gp_architectures(const std::string& dataset) {
  if (dataset == "esr") return {{}, {1}, {1, 1}, {5}, {5, 5}};
  return {{}, {1}, {1, 1}, {3}, {3, 3}};
}

hpo::SearchSpace tuning_space(const std::string& model, const std::string& dataset) {
  hpo::SearchSpace space;
  space.continuous("learning_rate", 1e-3, 1e-1, true);
  if (model == "ensemble") {
    space.integer("num_models", 2, 10);
    space.categorical("width", {"8", "16", "32", "64"});
  } else {
    space.integer("num_inducing", 50, 200);
    std::vector<std::string> labels;
    for (const auto& a : gp_architectures(dataset)) labels.push_back(arch_label(a));
    space.categorical("architecture", labels);
  }
  return space;
}

ExperimentConfig apply_trial(const ExperimentConfig& base, const hpo::SearchSpace& space,
                             const hpo::Config& trial) {
  ExperimentConfig c = base;
  for (const hpo::Domain& d : space.domains()) {
    const double v = trial.at(d.name);
    if (d.name == "learning_rate") c.learning_rate = v;
    else if (d.name == "num_models") c.num_models = static_cast<int>(v);
    else if (d.name == "num_inducing") c.num_inducing = static_cast<int>(v);
    else if (d.name == "width") {
      const int n = std::stoi(space.choice(trial, d.name));
      c.architecture = {2 * n, n};
    } else if (d.name == "architecture") {
      c.architecture = gp_architectures(base.dataset)[static_cast<std::size_t>(v)];
    } else {
      throw ConfigError("no config field for hyperparameter '" + d.name + "'");
    }
  }
  return c;
}

hpo::TuneResult run_tuning(const ExperimentConfig& config, const Dataset& data,
                           const hpo::SearchSpace& space) {
  const Partition part = make_partition(data);
  auto objective = [&](const hpo::Config& trial, std::uint64_t seed) {
    const ExperimentConfig c = apply_trial(config, space, trial);
    auto model = make_model(c, data.task, data.num_classes, part.x_train, mix(seed, 1));
    train(*model, part, c, mix(seed, 2));
    return evaluate(*model, data.task, part, part.x_val, part.y_val, c.calibration_bins, mix(seed, 3))
        .at("nll");
  };
  hpo::TuneOptions options;
  options.trials = config.tuning_trials;
  options.init = config.tuning_init;
  options.seed = config.seed;
  return hpo::tune(objective, space, options);
}

}  // namespace uqb::bench
