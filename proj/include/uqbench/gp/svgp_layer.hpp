#pragma once

#include "uqbench/gp/kernel.hpp"
#include "uqbench/gp/marginals.hpp"

#include <utility>
#include <vector>

namespace uqb::models {
class GaussianLikelihood;
}

namespace uqb::gp {

/// Prior mean of every unit in a layer.
enum class MeanFunction {
  kZero,
  /// One learnable constant per unit.
  kConstant,
  /// x P with a frozen D_in x H projection (skip connection for hidden layers).
  kLinear,
};

struct SVGPLayerOptions {
  Eigen::Index input_dim = 1;
  Eigen::Index width = 1;
  bool ard = false;
  double init_lengthscale = 1.0;
  double init_outputscale = 1.0;
  /// Initial q(v) = N(0, (scale I)^2) in whitened coordinates.
  double init_scale_tril = 1e-3;
  /// Added to K_ZZ before factorization.
  double inducing_jitter = 1e-6;
};

/// One GP unit: kernel hyperparameters plus its whitened inducing
/// distribution q(v) = N(m, Ls Ls^T), u = chol(K_ZZ) v.
struct SVGPUnit {
  RBFKernel kernel;
  diff::Parameter inducing;   ///< Z, M x D_in
  diff::Parameter var_mean;   ///< m, M x 1
  diff::Parameter scale_raw;  ///< strict lower part of Ls, log of its diagonal

  Matrix scale_tril() const;
  void set_scale_tril(const Matrix& lower);
};

/// Per-row marginals of every unit, B x H each.
struct LayerMarginals {
  Var mean;
  Var var;
};

/// A width-H sparse variational GP layer.
class SVGPLayer {
 public:
  /// Every unit starts with the same inducing locations `inducing_init` (M x D_in).
  SVGPLayer(const SVGPLayerOptions& options, const Matrix& inducing_init);

  void use_zero_mean();
  void use_constant_mean(double init);
  void use_linear_mean(const Matrix& projection);
  MeanFunction mean_function() const { return mean_function_; }
  /// Frozen projection for kLinear layers.
  const Matrix& projection() const { return mean_param_.raw(); }

  /// q(f(x)) for each unit by marginalizing the inducing variables:
  ///   mean = mu0(x) + A^T m,  var = k(x,x) - |A|^2 + |Ls^T A|^2,  A = L_ZZ^{-1} K_Zx.
  /// Variances are floored at 1e-10.
  LayerMarginals marginals(diff::Tape& tape, const Var& x);
  /// Convenience evaluation without gradients; columns are units.
  std::pair<Matrix, Matrix> predict(const Matrix& x);

  /// Sum over units of KL(q(v) || N(0, I)).
  Var kl(diff::Tape& tape);

  Eigen::Index width() const { return static_cast<Eigen::Index>(units_.size()); }
  Eigen::Index input_dim() const { return options_.input_dim; }
  Eigen::Index num_inducing() const { return units_.front().inducing.rows(); }
  std::vector<SVGPUnit>& units() { return units_; }
  const std::vector<SVGPUnit>& units() const { return units_; }
  diff::ParameterList parameters();

 private:
  SVGPLayerOptions options_;
  std::vector<SVGPUnit> units_;
  MeanFunction mean_function_ = MeanFunction::kZero;
  diff::Parameter mean_param_;
};

/// SVGP evidence lower bound for a Gaussian likelihood on a single-unit layer:
///   (N_total / B) * sum_i [ log N(y_i | mu_i, s^2) - var_i / (2 s^2) ] - beta * KL.
/// Throws ContractViolation on an empty batch.
Var svgp_elbo(diff::Tape& tape, SVGPLayer& layer, const Matrix& x, const Vector& y,
              models::GaussianLikelihood& likelihood, double n_total, double beta = 1.0);

}  // namespace uqb::gp
