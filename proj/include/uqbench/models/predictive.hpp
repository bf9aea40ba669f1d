#pragma once

#include "uqbench/diff/tape.hpp"

#include <variant>

namespace uqb::models {

using diff::Matrix;
using diff::Vector;

struct GaussianPrediction {
  Vector mean;
  Vector var;
};

/// Per-row Gaussian mixture with weights shared across rows.
struct MixturePrediction {
  Matrix means;    ///< N x Q
  Matrix vars;     ///< N x Q
  Vector weights;  ///< Q, on the simplex
};

struct CategoricalPrediction {
  Matrix probs;  ///< N x C, rows sum to 1
};

using Prediction = std::variant<GaussianPrediction, MixturePrediction, CategoricalPrediction>;

/// First two moments of each row's mixture:
///   mean = sum_j w_j mu_j,  var = sum_j w_j (s2_j + mu_j^2) - mean^2.
GaussianPrediction moment_match(const MixturePrediction& mixture);

/// log sum_j w_j N(y | mu_j, s2_j) for one row, by log-sum-exp.
double mixture_log_density(const Eigen::Ref<const Eigen::RowVectorXd>& means,
                           const Eigen::Ref<const Eigen::RowVectorXd>& vars, const Vector& weights,
                           double y);

/// Point prediction: the mean for regression, nothing for classification.
Vector predictive_mean(const Prediction& prediction);

/// Maps a regression prediction from standardized to raw target units.
Prediction unstandardize(Prediction prediction, double shift, double scale);

/// Row count of any prediction.
Eigen::Index prediction_rows(const Prediction& prediction);

}  // namespace uqb::models
