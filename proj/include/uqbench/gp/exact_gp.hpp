#pragma once

#include "uqbench/gp/kernel.hpp"
#include "uqbench/gp/marginals.hpp"

namespace uqb::gp {

struct ExactGPFitOptions {
  int steps = 100;
  double learning_rate = 0.05;
};

/// Exact GP regression with an RBF kernel, Gaussian observation noise and a
/// learnable constant mean.
///
///   y = f(x) + e,  f ~ GP(c, k_rbf),  e ~ N(0, noise_std^2)
///
/// Used as the Bayesian-optimization surrogate and as the reference that
/// sparse variational layers are tested against.
class ExactGP {
 public:
  /// The constant mean starts at mean(y) unless `mean` is given.
  ExactGP(Matrix x, Vector y, RBFKernel kernel, double noise_std);
  ExactGP(Matrix x, Vector y, RBFKernel kernel, double noise_std, double mean);

  /// log N(y | c 1, K + noise_std^2 I) through a Cholesky factor.
  Var log_marginal_likelihood(diff::Tape& tape);
  double log_marginal_likelihood();

  /// Closed-form conditioning at `xq`. The variance is that of f unless
  /// `observation_noise` is set, in which case noise_std^2 is added.
  GaussianMarginals posterior(const Matrix& xq, bool observation_noise = false) const;

  /// Maximizes the marginal likelihood over every parameter with Adam.
  void fit(const ExactGPFitOptions& options = {});

  const Matrix& inputs() const { return x_; }
  const Vector& targets() const { return y_; }
  RBFKernel& kernel() { return kernel_; }
  const RBFKernel& kernel() const { return kernel_; }
  double noise_std() const { return noise_.value()(0, 0); }
  double mean_constant() const { return mean_.value()(0, 0); }
  diff::Parameter& noise_parameter() { return noise_; }
  diff::Parameter& mean_parameter() { return mean_; }
  diff::ParameterList parameters();

 private:
  Matrix x_;
  Vector y_;
  RBFKernel kernel_;
  diff::Parameter noise_;
  diff::Parameter mean_;
};

}  // namespace uqb::gp
