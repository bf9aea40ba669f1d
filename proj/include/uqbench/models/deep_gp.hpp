#pragma once

#include "uqbench/models/gp_stack.hpp"
#include "uqbench/models/likelihood.hpp"
#include "uqbench/models/predictive.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace uqb::models {

struct DeepGPOptions {
  TaskKind task = TaskKind::kRegression;
  int num_classes = 2;
  std::vector<int> hidden;
  int num_inducing = 128;
  int mc_samples = 10;
  double beta = 1.0;
  bool ard = false;
  double noise_std = 0.3;
};

/// Deep GP trained with doubly stochastic variational inference.
///
/// Hidden layers are sampled by reparameterization, mu + eps * sigma; the
/// output layer stays analytic for regression and is sampled once per path
/// for classification. S paths are stacked as S blocks of B rows.
class DeepGP {
 public:
  DeepGP(const DeepGPOptions& options, const Matrix& x_train, std::mt19937_64& rng);

  /// Output-layer marginals for every path, (S*B) x W, path s in rows
  /// [s*B, (s+1)*B).
  gp::LayerMarginals forward(diff::Tape& tape, const Matrix& x, int samples,
                             std::mt19937_64& rng);

  /// Monte Carlo ELBO:
  ///   (N / B) * (1/S) sum_s sum_i E[log p(y_i | f_i^(s))] - beta * sum_l KL_l.
  /// Classification targets are class indices stored as doubles.
  Var elbo(diff::Tape& tape, const Matrix& x, const Vector& y, double n_total,
           std::mt19937_64& rng);

  /// Regression: S-component equal-weight mixture (observation noise included).
  /// Classification: softmax averaged over S sampled paths.
  Prediction predict(const Matrix& x, int samples, std::uint64_t seed);
  Prediction predict(const Matrix& x, std::uint64_t seed) {
    return predict(x, options_.mc_samples, seed);
  }

  LayerStack& stack() { return stack_; }
  GaussianLikelihood& gaussian_likelihood() { return gaussian_; }
  const DeepGPOptions& options() const { return options_; }
  diff::ParameterList parameters();

 private:
  DeepGPOptions options_;
  LayerStack stack_;
  GaussianLikelihood gaussian_;
  SoftmaxLikelihood softmax_;
};

/// Standard normal rows x cols matrix from `rng`.
Matrix standard_normal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols);

/// Index-valued targets stored as doubles, checked against [0, num_classes).
std::vector<int> class_indices(const Vector& y, int num_classes);

}  // namespace uqb::models
