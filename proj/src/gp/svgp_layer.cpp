#include "uqbench/gp/svgp_layer.hpp"

#include "uqbench/diff/linalg.hpp"
#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"
#include "uqbench/gp/kl.hpp"
#include "uqbench/models/likelihood.hpp"

#include <cmath>
#include <string>

namespace uqb::gp {

using namespace uqb::diff;

namespace {

constexpr double kVarianceFloor = 1e-10;

Matrix raw_from_lower(const Matrix& lower) {
  detail::require((lower.diagonal().array() > 0.0).all(),
                  "scale_tril: diagonal must be positive");
  Matrix raw = lower.triangularView<Eigen::StrictlyLower>();
  raw.diagonal() = lower.diagonal().array().log().matrix();
  return raw;
}

}  // namespace

Matrix SVGPUnit::scale_tril() const {
  const Matrix& raw = scale_raw.raw();
  Matrix lower = raw.triangularView<Eigen::StrictlyLower>();
  lower.diagonal() = raw.diagonal().array().exp().matrix();
  return lower;
}

void SVGPUnit::set_scale_tril(const Matrix& lower) { scale_raw.raw() = raw_from_lower(lower); }

SVGPLayer::SVGPLayer(const SVGPLayerOptions& options, const Matrix& inducing_init)
    : options_(options) {
  detail::require(options.width >= 1, "SVGPLayer: width must be >= 1");
  detail::require(inducing_init.rows() >= 1, "SVGPLayer: need at least one inducing point");
  detail::require(inducing_init.cols() == options.input_dim,
                  "SVGPLayer: inducing locations must have input_dim columns");
  const auto m = inducing_init.rows();
  units_.reserve(static_cast<std::size_t>(options.width));
  for (Eigen::Index h = 0; h < options.width; ++h) {
    SVGPUnit unit{
        RBFKernel(options.input_dim, options.ard, options.init_lengthscale,
                  options.init_outputscale),
        Parameter("inducing", inducing_init),
        Parameter("var_mean", Matrix::Zero(m, 1)),
        Parameter("scale_raw", raw_from_lower(options.init_scale_tril * Matrix::Identity(m, m))),
    };
    units_.push_back(std::move(unit));
  }
}

void SVGPLayer::use_zero_mean() {
  mean_function_ = MeanFunction::kZero;
  mean_param_ = Parameter();
}

void SVGPLayer::use_constant_mean(double init) {
  mean_function_ = MeanFunction::kConstant;
  mean_param_ = Parameter("mean_constant", Matrix::Constant(1, width(), init));
}

void SVGPLayer::use_linear_mean(const Matrix& projection) {
  detail::require(projection.rows() == input_dim() && projection.cols() == width(),
                  "SVGPLayer: projection must be input_dim x width");
  mean_function_ = MeanFunction::kLinear;
  mean_param_ = Parameter("mean_projection", projection, Transform::kIdentity, false);
}

ParameterList SVGPLayer::parameters() {
  ParameterList params;
  for (SVGPUnit& unit : units_) {
    for (Parameter* p : unit.kernel.parameters()) params.push_back(p);
    params.push_back(&unit.inducing);
    params.push_back(&unit.var_mean);
    params.push_back(&unit.scale_raw);
  }
  if (mean_function_ != MeanFunction::kZero) params.push_back(&mean_param_);
  return params;
}

LayerMarginals SVGPLayer::marginals(Tape& tape, const Var& x) {
  detail::require(x.cols() == input_dim(), "SVGPLayer::marginals: input has " +
                                               std::to_string(x.cols()) + " columns, expected " +
                                               std::to_string(input_dim()));
  const auto m = num_inducing();
  const Var identity = tape.constant(Matrix::Identity(m, m) * options_.inducing_jitter);
  std::vector<Var> means;
  std::vector<Var> vars;
  for (SVGPUnit& unit : units_) {
    const Var z = tape.bind(unit.inducing);
    const Var kzz = unit.kernel(tape, z, z) + identity;
    const Var lzz = cholesky(kzz);
    const Var kzx = unit.kernel(tape, z, x);
    const Var a = tri_solve_lower(lzz, kzx);
    const Var scale = lower_from_raw(tape.bind(unit.scale_raw));
    const Var sa = matmul(transpose(scale), a);

    means.push_back(matmul(transpose(a), tape.bind(unit.var_mean)));
    const Var prior_var = unit.kernel.outputscale(tape);
    const Var var = prior_var - transpose(col_sums(square(a))) + transpose(col_sums(square(sa)));
    vars.push_back(clamp_min(var, kVarianceFloor));
  }
  Var mean = width() == 1 ? means.front() : hconcat(means);
  const Var var = width() == 1 ? vars.front() : hconcat(vars);

  switch (mean_function_) {
    case MeanFunction::kZero:
      break;
    case MeanFunction::kConstant:
      mean = mean + tape.bind(mean_param_);
      break;
    case MeanFunction::kLinear:
      mean = mean + matmul(x, tape.bind(mean_param_));
      break;
  }
  return {mean, var};
}

std::pair<Matrix, Matrix> SVGPLayer::predict(const Matrix& x) {
  Tape tape(false);
  const LayerMarginals out = marginals(tape, tape.constant(x));
  return {out.mean.value(), out.var.value()};
}

Var SVGPLayer::kl(Tape& tape) {
  Var total = tape.constant(0.0);
  for (SVGPUnit& unit : units_) {
    total = total + whitened_kl(tape.bind(unit.var_mean), lower_from_raw(tape.bind(unit.scale_raw)));
  }
  return total;
}

Var svgp_elbo(Tape& tape, SVGPLayer& layer, const Matrix& x, const Vector& y,
              models::GaussianLikelihood& likelihood, double n_total, double beta) {
  detail::require(x.rows() > 0, "svgp_elbo: empty batch");
  detail::require(x.rows() == y.size(), "svgp_elbo: input and target counts differ");
  detail::require(layer.width() == 1, "svgp_elbo: Gaussian likelihood needs a width-1 layer");
  detail::require(beta >= 0.0, "svgp_elbo: beta must be >= 0");
  const LayerMarginals q = layer.marginals(tape, tape.constant(x));
  const Var ell = sum(likelihood.expected_log_prob(tape, tape.constant(y), q.mean, q.var));
  const double scale = n_total / static_cast<double>(x.rows());
  const Var data_term = ell * scale;
  if (beta == 0.0) return data_term;
  return data_term - layer.kl(tape) * beta;
}

}  // namespace uqb::gp
