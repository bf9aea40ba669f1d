#include "uqbench/bench/io.hpp"

#include "uqbench/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace uqb::bench {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json stamp_json(const ExperimentConfig& c) {
  return json{{"config_hash", config_hash(c)}, {"version", version()}};
}

}  // namespace

std::string version() { return UQBENCH_VERSION; }

std::string csv_stamp(const ExperimentConfig& c) {
  return "# config_hash=" + config_hash(c) + ",version=" + version() + "\n";
}

std::string loss_curve_csv(const std::vector<EpochLoss>& curve) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (const EpochLoss& e : curve) {
    out += std::to_string(e.epoch) + "," + num(e.train_loss) + "," + num(e.val_loss) + "\n";
  }
  return out;
}

std::string shift_results_csv(const std::vector<ShiftRow>& rows) {
  std::string out = "model,seed,kind,severity,metric,value\n";
  for (const ShiftRow& r : rows) {
    out += r.model + "," + std::to_string(r.seed) + "," + r.kind + "," + num(r.severity) + "," +
           r.metric + "," + num(r.value) + "\n";
  }
  return out;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "model,sweep,value,nll\n";
  for (const AblationRow& r : rows) {
    out += r.model + "," + r.sweep + "," + std::to_string(r.value) + "," + num(r.nll) + "\n";
  }
  return out;
}

json metrics_json(const ExperimentConfig& c, const MetricReport& metrics) {
  json j = stamp_json(c);
  j["model"] = c.model;
  j["dataset"] = c.dataset;
  j["metrics"] = metrics;
  j["config"] = to_json(c);
  return j;
}

json trial_json(const ExperimentConfig& c, const hpo::SearchSpace& space,
                const hpo::TrialRecord& t) {
  json params = json::object();
  for (const hpo::Domain& d : space.domains()) {
    if (d.kind == hpo::DomainKind::kCategorical) params[d.name] = space.choice(t.config, d.name);
    else if (d.kind == hpo::DomainKind::kInteger) params[d.name] = static_cast<long>(t.config.at(d.name));
    else params[d.name] = t.config.at(d.name);
  }
  json j = stamp_json(c);
  j["trial"] = t.index;
  j["config"] = params;
  j["status"] = t.status == hpo::TrialStatus::kCompleted ? "completed" : "failed";
  j["objective"] = t.status == hpo::TrialStatus::kCompleted ? json(t.objective) : json(nullptr);
  j["seed"] = t.seed;
  if (!t.error.empty()) j["error"] = t.error;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_run(const std::filesystem::path& dir, const ExperimentConfig& c, const RunResult& run) {
  write_text(dir / "metrics.json", metrics_json(c, run.metrics).dump(2) + "\n");
  write_text(dir / "loss_curve.csv", loss_curve_csv(run.curve) + csv_stamp(c));
  write_text(dir / "reliability.csv", metrics::reliability_csv(run.reliability) + csv_stamp(c));
}

void write_shift(const std::filesystem::path& dir, const ExperimentConfig& c, const ShiftResult& result) {
  write_text(dir / "shift_results.csv", shift_results_csv(result.rows) + csv_stamp(c));
  json base = stamp_json(c);
  base["model"] = c.model;
  base["dataset"] = c.dataset;
  base["runs"] = json::array();
  for (const auto& [seed, metrics] : result.baselines) {
    base["runs"].push_back({{"seed", seed}, {"metrics", metrics}});
  }
  write_text(dir / "baseline_metrics.json", base.dump(2) + "\n");
}

void write_tuning(const std::filesystem::path& dir, const ExperimentConfig& c,
                  const hpo::SearchSpace& space, const hpo::TuneResult& result) {
  std::string lines;
  for (const hpo::TrialRecord& t : result.history) lines += trial_json(c, space, t).dump() + "\n";
  write_text(dir / "trials.jsonl", lines);
  json best = stamp_json(c);
  best["objective"] = result.best.objective;
  best["trial"] = result.best.index;
  best["config"] = to_json(apply_trial(c, space, result.best.config));
  write_text(dir / "best_config.json", best.dump(2) + "\n");
}

void write_ablation(const std::filesystem::path& dir, const ExperimentConfig& c,
                    const std::string& kind, const std::vector<AblationRow>& rows) {
  write_text(dir / ("ablation_" + kind + ".csv"), ablation_csv(rows) + csv_stamp(c));
}

std::string report(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> metric_files;
  std::vector<std::filesystem::path> shift_files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.path().filename() == "metrics.json") metric_files.push_back(entry.path());
    if (entry.path().filename() == "shift_results.csv") shift_files.push_back(entry.path());
  }
  std::sort(metric_files.begin(), metric_files.end());
  std::sort(shift_files.begin(), shift_files.end());

  std::ostringstream out;
  for (const auto& path : metric_files) {
    std::ifstream in(path);
    const json j = json::parse(in);
    out << path.parent_path().lexically_relative(dir).string() << ": " << j.value("model", "?")
        << " on " << j.value("dataset", "?");
    for (const auto& [name, value] : j.at("metrics").items()) out << "  " << name << "=" << value.get<double>();
    out << "\n";
  }

  for (const auto& path : shift_files) {
    std::map<std::tuple<std::string, std::string, double, std::string>, std::vector<double>> groups;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string model, seed, kind, severity, metric, value;
      std::getline(ss, model, ',');
      std::getline(ss, seed, ',');
      std::getline(ss, kind, ',');
      std::getline(ss, severity, ',');
      std::getline(ss, metric, ',');
      std::getline(ss, value, ',');
      groups[{model, kind, std::stod(severity), metric}].push_back(std::stod(value));
    }
    out << path.lexically_relative(dir).string() << " (median over runs)\n";
    for (auto& [key, values] : groups) {
      std::sort(values.begin(), values.end());
      const std::size_t m = values.size();
      const double median = m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
      char buf[160];
      std::snprintf(buf, sizeof buf, "  %-8s %-20s s=%.1f %-6s %.6g (n=%zu)\n", std::get<0>(key).c_str(),
                    std::get<1>(key).c_str(), std::get<2>(key), std::get<3>(key).c_str(), median, m);
      out << buf;
    }
  }
  if (metric_files.empty() && shift_files.empty()) out << "no results under " << dir.string() << "\n";
  return out.str();
}

}  // namespace uqb::bench
