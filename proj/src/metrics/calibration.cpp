#include "uqbench/metrics/calibration.hpp"

#include "uqbench/errors.hpp"
#include "uqbench/metrics/normal.hpp"
#include "uqbench/models/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace uqb::metrics {

namespace {

void check_labels(const Matrix& probs, const std::vector<int>& labels) {
  detail::require(probs.rows() == static_cast<Eigen::Index>(labels.size()),
                  "metrics: probability rows and label count differ");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= probs.cols()) {
      throw ContractViolation("metrics: label " + std::to_string(labels[i]) + " at row " +
                              std::to_string(i) + " is out of range");
    }
  }
}

int bin_of(double confidence, int bins) {
  int b = static_cast<int>(std::ceil(confidence * bins));
  if (b > 1 && static_cast<double>(b - 1) / bins >= confidence) --b;
  return std::clamp(b, 1, bins);
}

}  // namespace

double nll_classification(const Matrix& probs, const std::vector<int>& labels) {
  check_labels(probs, labels);
  detail::require(!labels.empty(), "nll_classification: no rows");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total -= std::log(std::max(probs(static_cast<Eigen::Index>(i), labels[i]),
                               models::kProbabilityFloor));
  }
  return total / static_cast<double>(labels.size());
}

double nll_regression(const models::Prediction& prediction, const Vector& y) {
  detail::require(y.size() > 0, "nll_regression: no rows");
  detail::require(models::prediction_rows(prediction) == y.size(),
                  "nll_regression: prediction rows and target count differ");
  double total = 0.0;
  if (const auto* g = std::get_if<models::GaussianPrediction>(&prediction)) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      total -= models::gaussian_log_prob(y(i), g->mean(i), g->var(i));
    }
  } else if (const auto* m = std::get_if<models::MixturePrediction>(&prediction)) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      total -= models::mixture_log_density(m->means.row(i), m->vars.row(i), m->weights, y(i));
    }
  } else {
    throw ContractViolation("nll_regression: categorical prediction");
  }
  return total / static_cast<double>(y.size());
}

int argmax_class(const Eigen::Ref<const Eigen::RowVectorXd>& probs) {
  int best = 0;
  for (Eigen::Index c = 1; c < probs.size(); ++c) {
    if (probs(c) > probs(best)) best = static_cast<int>(c);
  }
  return best;
}

double accuracy(const Matrix& probs, const std::vector<int>& labels) {
  check_labels(probs, labels);
  detail::require(!labels.empty(), "accuracy: no rows");
  long correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (argmax_class(probs.row(static_cast<Eigen::Index>(i))) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double mae(const Vector& predictions, const Vector& y) {
  detail::require(predictions.size() == y.size() && y.size() > 0,
                  "mae: lengths differ or are empty");
  return (predictions - y).cwiseAbs().mean();
}

EceResult ece_classification(const Matrix& probs, const std::vector<int>& labels, int bins) {
  check_labels(probs, labels);
  detail::require(bins >= 1, "ece_classification: need at least one bin");
  detail::require(!labels.empty(), "ece_classification: no rows");
  EceResult out;
  out.bins.resize(static_cast<std::size_t>(bins));
  std::vector<double> correct(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> conf(static_cast<std::size_t>(bins), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = probs.row(static_cast<Eigen::Index>(i));
    const int pred = argmax_class(row);
    const double c = row(pred);
    const auto b = static_cast<std::size_t>(bin_of(c, bins) - 1);
    ++out.bins[b].count;
    conf[b] += c;
    if (pred == labels[i]) correct[b] += 1.0;
  }
  const double n = static_cast<double>(labels.size());
  for (int b = 0; b < bins; ++b) {
    ReliabilityBin& bin = out.bins[static_cast<std::size_t>(b)];
    bin.bin = b + 1;
    bin.lower = static_cast<double>(b) / bins;
    bin.upper = static_cast<double>(b + 1) / bins;
    if (bin.count == 0) continue;
    const double k = static_cast<double>(bin.count);
    bin.accuracy = correct[static_cast<std::size_t>(b)] / k;
    bin.confidence = conf[static_cast<std::size_t>(b)] / k;
    out.ece += (k / n) * std::abs(bin.accuracy - bin.confidence);
  }
  return out;
}

RegressionCalibration regression_calibration(const Vector& means, const Vector& stds,
                                             const Vector& y, int bins) {
  detail::require(means.size() == y.size() && stds.size() == y.size() && y.size() > 0,
                  "regression_calibration: lengths differ or are empty");
  detail::require((stds.array() > 0.0).all(), "regression_calibration: stds must be positive");
  detail::require(bins >= 1, "regression_calibration: need at least one level");
  const Vector score = ((y - means).array().abs() / stds.array()).matrix();
  RegressionCalibration out;
  for (int k = 1; k <= bins; ++k) {
    CoverageRow row;
    row.alpha = static_cast<double>(k) / (bins + 1);
    row.z = std::abs(normal_quantile(0.5 * (1.0 + row.alpha)));
    row.coverage = (score.array() <= row.z).cast<double>().mean();
    out.error += std::abs(row.alpha - row.coverage);
    out.rows.push_back(row);
  }
  out.error /= bins;
  return out;
}

std::vector<ReliabilityRow> reliability_curve(const Matrix& probs, const std::vector<int>& labels,
                                              int bins) {
  const EceResult ece = ece_classification(probs, labels, bins);
  std::vector<ReliabilityRow> rows;
  for (const ReliabilityBin& b : ece.bins) {
    if (b.count == 0) continue;
    rows.push_back({b.bin, b.confidence, b.accuracy, b.count});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.confidence < b.confidence;
  });
  return rows;
}

std::vector<ReliabilityRow> reliability_curve(const Vector& means, const Vector& stds,
                                              const Vector& y, int bins) {
  const RegressionCalibration cal = regression_calibration(means, stds, y, bins);
  std::vector<ReliabilityRow> rows;
  for (std::size_t k = 0; k < cal.rows.size(); ++k) {
    rows.push_back({static_cast<int>(k) + 1, cal.rows[k].alpha, cal.rows[k].coverage,
                    static_cast<long>(y.size())});
  }
  return rows;
}

std::string reliability_csv(const std::vector<ReliabilityRow>& rows) {
  std::string out = "bin,confidence,accuracy,count\n";
  char line[128];
  for (const ReliabilityRow& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%ld\n", r.bin, r.confidence, r.accuracy,
                  r.count);
    out += line;
  }
  return out;
}

}  // namespace uqb::metrics
