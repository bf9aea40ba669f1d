#pragma once

#include "uqbench/diff/parameter.hpp"
#include "uqbench/models/likelihood.hpp"
#include "uqbench/models/predictive.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace uqb::models {

/// Minimum of every materialized variance head.
inline constexpr double kVarianceHeadFloor = 1e-6;

/// ReLU MLP with a mean head and a variance head per output. The variance is
/// softplus(raw) + kVarianceHeadFloor.
class MLPMember {
 public:
  struct Output {
    Var mean;  ///< B x heads
    Var var;   ///< B x heads
  };

  /// Weights and biases start uniform in +-1/sqrt(fan_in).
  MLPMember(Eigen::Index input_dim, const std::vector<int>& hidden, Eigen::Index heads,
            std::mt19937_64& rng);

  Output forward(diff::Tape& tape, const Var& x);
  /// (means, variances), each B x heads.
  std::pair<Matrix, Matrix> predict(const Matrix& x);

  Eigen::Index heads() const { return heads_; }
  std::vector<diff::Parameter>& weights() { return weights_; }
  std::vector<diff::Parameter>& biases() { return biases_; }
  diff::ParameterList parameters();

 private:
  Eigen::Index heads_;
  std::vector<diff::Parameter> weights_;
  std::vector<diff::Parameter> biases_;
};

/// sum_i 0.5 log(2 pi s2_i) + (y_i - mu_i)^2 / (2 s2_i).
Var gaussian_nll_sum(const Var& y, const Var& mean, const Var& var);

/// Gaussian NLL of one member summed over the batch.
Var member_regression_loss(diff::Tape& tape, MLPMember& member, const Matrix& x, const Vector& y);

/// Cross entropy of softmax(mean logits) summed over the batch; the variance
/// head is not part of the training signal.
Var member_classification_loss(diff::Tape& tape, MLPMember& member, const Matrix& x,
                               const std::vector<int>& labels);

/// Moment-matched equal-weight mixture of K members (columns of N x K inputs).
GaussianPrediction aggregate_regression(const Matrix& means, const Matrix& vars);

/// Softmax of sampled logits z ~ N(mu_k, s2_k), averaged over members and
/// `samples_per_member` draws. Inputs are one (means, vars) pair per member.
Matrix ensemble_classify(const std::vector<std::pair<Matrix, Matrix>>& members,
                         int samples_per_member, std::uint64_t seed);

struct EnsembleOptions {
  TaskKind task = TaskKind::kRegression;
  int num_classes = 2;
  std::vector<int> hidden{128, 64};
  int num_models = 5;
  int samples_per_member = 100;
};

class DeepEnsemble {
 public:
  /// Each member gets its own generator seeded from `rng`.
  DeepEnsemble(const EnsembleOptions& options, Eigen::Index input_dim, std::mt19937_64& rng);

  /// Members' per-point losses averaged over the batch and over members. The
  /// members share no parameters, so each gets its own gradient.
  Var loss(diff::Tape& tape, const Matrix& x, const Vector& y);

  /// Regression: moment-matched Gaussian. Classification: sampled softmax average.
  Prediction predict(const Matrix& x, std::uint64_t seed);

  std::vector<MLPMember>& members() { return members_; }
  const EnsembleOptions& options() const { return options_; }
  diff::ParameterList parameters();

 private:
  EnsembleOptions options_;
  std::vector<MLPMember> members_;
};

}  // namespace uqb::models
