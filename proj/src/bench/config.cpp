#include "uqbench/bench/config.hpp"

#include "uqbench/errors.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace uqb::bench {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& field) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    field = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model", "dataset", "data_path", "synthetic_task", "synthetic_size", "check_dataset_size",
      "learning_rate", "epochs", "batch_size", "architecture", "num_inducing", "num_models",
      "mc_samples", "quadrature_sites", "beta", "seed", "shift_runs", "severity_schedule",
      "calibration_bins", "tuning_trials", "tuning_init", "output_dir"};
  return keys;
}

}  // namespace

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  read(j, "model", c.model);
  read(j, "dataset", c.dataset);
  read(j, "data_path", c.data_path);
  read(j, "synthetic_task", c.synthetic_task);
  read(j, "synthetic_size", c.synthetic_size);
  read(j, "check_dataset_size", c.check_dataset_size);
  read(j, "learning_rate", c.learning_rate);
  read(j, "epochs", c.epochs);
  read(j, "batch_size", c.batch_size);
  read(j, "architecture", c.architecture);
  read(j, "num_inducing", c.num_inducing);
  read(j, "num_models", c.num_models);
  read(j, "mc_samples", c.mc_samples);
  read(j, "quadrature_sites", c.quadrature_sites);
  read(j, "beta", c.beta);
  read(j, "seed", c.seed);
  read(j, "shift_runs", c.shift_runs);
  read(j, "severity_schedule", c.severity_schedule);
  read(j, "calibration_bins", c.calibration_bins);
  read(j, "tuning_trials", c.tuning_trials);
  read(j, "tuning_init", c.tuning_init);
  read(j, "output_dir", c.output_dir);
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  return json{{"model", c.model},
              {"dataset", c.dataset},
              {"data_path", c.data_path},
              {"synthetic_task", c.synthetic_task},
              {"synthetic_size", c.synthetic_size},
              {"check_dataset_size", c.check_dataset_size},
              {"learning_rate", c.learning_rate},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"architecture", c.architecture},
              {"num_inducing", c.num_inducing},
              {"num_models", c.num_models},
              {"mc_samples", c.mc_samples},
              {"quadrature_sites", c.quadrature_sites},
              {"beta", c.beta},
              {"seed", c.seed},
              {"shift_runs", c.shift_runs},
              {"severity_schedule", c.severity_schedule},
              {"calibration_bins", c.calibration_bins},
              {"tuning_trials", c.tuning_trials},
              {"tuning_init", c.tuning_init},
              {"output_dir", c.output_dir}};
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.model != "dgp" && c.model != "dspp" && c.model != "ensemble") {
    fail("model must be dgp, dspp or ensemble, got '" + c.model + "'");
  }
  if (c.dataset != "casp" && c.dataset != "esr" && c.dataset != "synthetic") {
    fail("dataset must be casp, esr or synthetic, got '" + c.dataset + "'");
  }
  if (c.synthetic_task != "regression" && c.synthetic_task != "classification") {
    fail("synthetic_task must be regression or classification");
  }
  if (c.dataset != "synthetic" && c.data_path.empty()) fail("data_path is required for " + c.dataset);
  if (c.synthetic_size < 10) fail("synthetic_size must be >= 10");
  if (!(c.learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (c.epochs < 1) fail("epochs must be >= 1");
  if (c.batch_size < 1) fail("batch_size must be >= 1");
  for (int w : c.architecture) {
    if (w < 1) fail("architecture widths must be >= 1");
  }
  if (c.num_inducing < 1) fail("num_inducing must be >= 1");
  if (c.num_models < 1) fail("num_models must be >= 1");
  if (c.mc_samples < 1) fail("mc_samples must be >= 1");
  if (c.quadrature_sites < 1) fail("quadrature_sites must be >= 1");
  if (!(c.beta >= 0.0)) fail("beta must be >= 0");
  if (c.shift_runs < 1) fail("shift_runs must be >= 1");
  if (c.calibration_bins < 1) fail("calibration_bins must be >= 1");
  if (c.tuning_init < 1 || c.tuning_trials < c.tuning_init) fail("need tuning_trials >= tuning_init >= 1");
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

std::vector<std::string> preset_names() {
  return {"dgp-casp", "ensemble-casp", "dspp-casp", "dgp-esr", "ensemble-esr", "dspp-esr"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  auto set = [&c](std::string model, std::string dataset, double lr, int epochs,
                  std::vector<int> arch, int m, int k) {
    c.model = std::move(model);
    c.dataset = std::move(dataset);
    c.learning_rate = lr;
    c.epochs = epochs;
    c.architecture = std::move(arch);
    c.num_inducing = m;
    c.num_models = k;
  };
  if (name == "dgp-casp") set("dgp", "casp", 0.1, 20, {3}, 159, 5);
  else if (name == "ensemble-casp") set("ensemble", "casp", 0.025, 20, {128, 64}, 128, 9);
  else if (name == "dspp-casp") set("dspp", "casp", 0.055, 20, {}, 50, 5);
  else if (name == "dgp-esr") set("dgp", "esr", 0.1, 30, {5, 2}, 200, 5);
  else if (name == "ensemble-esr") set("ensemble", "esr", 0.001, 30, {128, 64}, 128, 10);
  else if (name == "dspp-esr") set("dspp", "esr", 0.068, 30, {5, 5, 2}, 50, 5);
  else throw ConfigError("unknown preset '" + name + "'");
  return c;
}

}  // namespace uqb::bench
