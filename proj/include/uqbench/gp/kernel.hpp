#pragma once

#include "uqbench/diff/parameter.hpp"
#include "uqbench/diff/tape.hpp"

namespace uqb::gp {

using diff::Matrix;
using diff::Var;
using diff::Vector;

/// Lengthscales are either one shared value or one per input dimension (ARD).
struct RBFParams {
  Vector lengthscales = Vector::Ones(1);
  double outputscale = 1.0;

  bool ard() const { return lengthscales.size() > 1; }
};

/// K(i, j) = outputscale * exp(-||x_i - x2_j||^2 / (2 l^2)).
///
/// The outputscale multiplies the exponential directly (it is the prior
/// variance, not its square root), so k(x, x) = outputscale.
Matrix rbf_kernel(const Matrix& x, const Matrix& x2, const RBFParams& params);

/// Differentiable form. `lengthscale` is 1x1 or 1xD, `outputscale` 1x1.
Var rbf_kernel(const Var& x, const Var& x2, const Var& lengthscale, const Var& outputscale);

/// RBF kernel with log-parameterized hyperparameters.
class RBFKernel {
 public:
  RBFKernel() = default;
  RBFKernel(Eigen::Index input_dim, bool ard, double lengthscale = 1.0, double outputscale = 1.0);

  RBFParams params() const;
  Eigen::Index input_dim() const { return input_dim_; }

  Var operator()(diff::Tape& tape, const Var& x, const Var& x2);
  Var outputscale(diff::Tape& tape) { return tape.bind(outputscale_); }

  diff::Parameter& lengthscale_parameter() { return lengthscale_; }
  diff::Parameter& outputscale_parameter() { return outputscale_; }
  diff::ParameterList parameters() { return {&lengthscale_, &outputscale_}; }

 private:
  Eigen::Index input_dim_ = 1;
  diff::Parameter lengthscale_;
  diff::Parameter outputscale_;
};

}  // namespace uqb::gp
