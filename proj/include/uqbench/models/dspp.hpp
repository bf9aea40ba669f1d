#pragma once

#include "uqbench/models/gp_stack.hpp"
#include "uqbench/models/likelihood.hpp"
#include "uqbench/models/predictive.hpp"

#include <random>
#include <vector>

namespace uqb::models {

struct DSPPOptions {
  TaskKind task = TaskKind::kRegression;
  int num_classes = 2;
  std::vector<int> hidden;
  int num_inducing = 128;
  int quadrature_sites = 8;
  double beta = 1.0;
  bool ard = false;
  double noise_std = 0.3;
};

/// Deep sigma point process.
///
/// Every hidden layer carries Q learnable scalar sites xi_l^(j) shared by its
/// units; site j defines one deterministic path f = mu + xi^(j) sigma through
/// all hidden layers, so the predictive is a Q-component mixture with weights
/// softmax(rho). Paths are stacked as Q blocks of B rows.
class DSPP {
 public:
  DSPP(const DSPPOptions& options, const Matrix& x_train, std::mt19937_64& rng);

  /// Output-layer marginals at every site, (Q*B) x W.
  gp::LayerMarginals components(diff::Tape& tape, const Matrix& x);

  /// log p^(j)(y_i | x_i), B x Q. Regression uses N(y | mu_j, var_j + s^2);
  /// classification uses softmax of the mean logits scaled by
  /// 1 / sqrt(1 + pi var_j / 8).
  Var component_log_likelihood(diff::Tape& tape, const Matrix& x, const Vector& y);

  /// log sum_j w_j p^(j)(y_i | x_i), B x 1.
  Var log_density(diff::Tape& tape, const Matrix& x, const Vector& y);

  /// (N / B) sum_i log p(y_i | x_i) - beta * sum_l KL_l. No sampling.
  Var objective(diff::Tape& tape, const Matrix& x, const Vector& y, double n_total);

  Prediction predict(const Matrix& x);

  /// Materialized quadrature weights, Q.
  Vector weights() const;
  Var log_weights(diff::Tape& tape);
  int num_sites() const { return options_.quadrature_sites; }
  std::vector<diff::Parameter>& sites() { return sites_; }
  diff::Parameter& weight_logits() { return rho_; }

  LayerStack& stack() { return stack_; }
  GaussianLikelihood& gaussian_likelihood() { return gaussian_; }
  const DSPPOptions& options() const { return options_; }
  diff::ParameterList parameters();

 private:
  DSPPOptions options_;
  LayerStack stack_;
  GaussianLikelihood gaussian_;
  SoftmaxLikelihood softmax_;
  std::vector<diff::Parameter> sites_;  ///< one Q x 1 per hidden layer
  diff::Parameter rho_;                 ///< 1 x Q
};

}  // namespace uqb::models
