#pragma once

#include "uqbench/models/predictive.hpp"

#include <string>
#include <vector>

namespace uqb::metrics {

using diff::Matrix;
using diff::Vector;

/// Mean of -log p(y_i | x_i); probabilities are clamped at 1e-300.
double nll_classification(const Matrix& probs, const std::vector<int>& labels);

/// Mean Gaussian or mixture negative log density of `y`.
double nll_regression(const models::Prediction& prediction, const Vector& y);

/// Predicted class, lowest index on ties.
int argmax_class(const Eigen::Ref<const Eigen::RowVectorXd>& probs);
double accuracy(const Matrix& probs, const std::vector<int>& labels);
double mae(const Vector& predictions, const Vector& y);

struct ReliabilityBin {
  int bin = 0;  ///< 1-based
  double lower = 0.0;
  double upper = 0.0;
  long count = 0;
  double accuracy = 0.0;
  double confidence = 0.0;
};

struct EceResult {
  double ece = 0.0;
  std::vector<ReliabilityBin> bins;  ///< all B bins, empty ones with count 0
};

/// Bins by max-probability confidence into ((b-1)/B, b/B]; confidence 0 goes
/// to the first bin. ECE = sum_b (|B_b| / N) |acc_b - conf_b|.
EceResult ece_classification(const Matrix& probs, const std::vector<int>& labels, int bins = 10);

struct CoverageRow {
  double alpha = 0.0;
  double z = 0.0;
  double coverage = 0.0;
};

struct RegressionCalibration {
  double error = 0.0;
  std::vector<CoverageRow> rows;
};

/// Central interval coverage at alpha_k = k / (B + 1), k = 1..B. The interval
/// is mu +- |z| sigma with z the (1 + alpha)/2 quantile;
/// CE_reg = mean_k |alpha_k - coverage_k|.
RegressionCalibration regression_calibration(const Vector& means, const Vector& stds,
                                             const Vector& y, int bins = 10);

/// One plot row; for regression `confidence` is alpha and `accuracy` coverage.
struct ReliabilityRow {
  int bin = 0;
  double confidence = 0.0;
  double accuracy = 0.0;
  long count = 0;
};

/// Non-empty classification bins, ascending confidence.
std::vector<ReliabilityRow> reliability_curve(const Matrix& probs, const std::vector<int>& labels,
                                              int bins = 10);
/// One row per alpha level, ascending.
std::vector<ReliabilityRow> reliability_curve(const Vector& means, const Vector& stds,
                                              const Vector& y, int bins = 10);

/// CSV with header `bin,confidence,accuracy,count`.
std::string reliability_csv(const std::vector<ReliabilityRow>& rows);

}  // namespace uqb::metrics
