#include "uqbench/models/dspp.hpp"

#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"
#include "uqbench/models/deep_gp.hpp"
#include "uqbench/models/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace uqb::models {

using namespace uqb::diff;

namespace {

StackOptions stack_options(const DSPPOptions& o, Eigen::Index input_dim) {
  detail::require(o.quadrature_sites >= 1, "DSPP: quadrature_sites must be >= 1");
  detail::require(o.beta >= 0.0, "DSPP: beta must be >= 0");
  StackOptions s;
  s.input_dim = input_dim;
  s.hidden = o.hidden;
  s.output_width = o.task == TaskKind::kRegression ? 1 : o.num_classes;
  s.num_inducing = o.num_inducing;
  s.ard = o.ard;
  return s;
}

// Row j*B + i of the result picks site j.
Matrix site_indicator(Eigen::Index b, int q) {
  Matrix e = Matrix::Zero(b * q, q);
  for (int j = 0; j < q; ++j) e.block(j * b, j, b, 1).setOnes();
  return e;
}

}  // namespace

DSPP::DSPP(const DSPPOptions& options, const Matrix& x_train, std::mt19937_64& rng)
    : options_(options),
      stack_(stack_options(options, x_train.cols()), x_train, rng),
      gaussian_(options.noise_std),
      softmax_(options.task == TaskKind::kRegression ? 2 : options.num_classes) {
  const QuadratureRule rule = gauss_hermite(options.quadrature_sites);
  for (std::size_t l = 0; l < stack_.num_hidden(); ++l) {
    sites_.emplace_back("quadrature_sites_" + std::to_string(l), Matrix(rule.nodes));
  }
  rho_ = Parameter("quadrature_logits", Matrix(rule.weights.array().log().matrix().transpose()));
}

gp::LayerMarginals DSPP::components(Tape& tape, const Matrix& x) {
  const int q = options_.quadrature_sites;
  std::vector<Var> noise;
  if (!sites_.empty()) {
    const Var e = tape.constant(site_indicator(x.rows(), q));
    for (Parameter& xi : sites_) noise.push_back(matmul(e, tape.bind(xi)));
  }
  return stack_.propagate(tape, tile_rows(tape.constant(x), q), noise);
}

Var DSPP::component_log_likelihood(Tape& tape, const Matrix& x, const Vector& y) {
  detail::require(x.rows() > 0, "DSPP: empty batch");
  detail::require(x.rows() == y.size(), "DSPP: input and target counts differ");
  const int q = options_.quadrature_sites;
  const gp::LayerMarginals f = components(tape, x);
  Var per_row;
  if (options_.task == TaskKind::kRegression) {
    const Var y_paths = tape.constant(y.replicate(q, 1));
    per_row = models::gaussian_log_prob(y_paths, f.mean, f.var + gaussian_.noise_var(tape));
  } else {
    const Var logits = f.mean / sqrt(f.var * (std::numbers::pi / 8.0) + 1.0);
    const std::vector<int> labels = class_indices(y, options_.num_classes);
    std::vector<int> tiled;
    for (int j = 0; j < q; ++j) tiled.insert(tiled.end(), labels.begin(), labels.end());
    per_row = pick(softmax_.log_probs(tape, logits), tiled);
  }
  return reshape(per_row, x.rows(), q);
}

Var DSPP::log_weights(Tape& tape) { return log_softmax_rows(tape.bind(rho_)); }

Vector DSPP::weights() const {
  const Eigen::RowVectorXd rho = rho_.value().row(0);
  const Eigen::RowVectorXd shifted = rho.array() - rho.maxCoeff();
  const Eigen::RowVectorXd w = shifted.array().exp();
  return (w / w.sum()).transpose();
}

Var DSPP::log_density(Tape& tape, const Matrix& x, const Vector& y) {
  return logsumexp_rows(component_log_likelihood(tape, x, y) + log_weights(tape));
}

Var DSPP::objective(Tape& tape, const Matrix& x, const Vector& y, double n_total) {
  const Var data_term =
      sum(log_density(tape, x, y)) * (n_total / static_cast<double>(x.rows()));
  if (options_.beta == 0.0) return data_term;
  return data_term - stack_.kl(tape) * options_.beta;
}

Prediction DSPP::predict(const Matrix& x) {
  Tape tape(false);
  const int q = options_.quadrature_sites;
  const Eigen::Index b = x.rows();
  const gp::LayerMarginals f = components(tape, x);
  const Vector w = weights();
  if (options_.task == TaskKind::kRegression) {
    MixturePrediction out;
    out.means = f.mean.value().reshaped(b, q);
    out.vars = (f.var.value().array() + gaussian_.noise_var()).matrix().reshaped(b, q);
    out.weights = w;
    return out;
  }
  const Matrix logits =
      (f.mean.value().array() / (f.var.value().array() * (std::numbers::pi / 8.0) + 1.0).sqrt())
          .matrix();
  const Matrix probs = softmax_.probs(logits);
  CategoricalPrediction out{Matrix::Zero(b, options_.num_classes)};
  for (int j = 0; j < q; ++j) out.probs += w(j) * probs.middleRows(j * b, b);
  return out;
}

diff::ParameterList DSPP::parameters() {
  diff::ParameterList params = stack_.parameters();
  for (Parameter& xi : sites_) params.push_back(&xi);
  params.push_back(&rho_);
  if (options_.task == TaskKind::kRegression) params.push_back(&gaussian_.noise_parameter());
  return params;
}

}  // namespace uqb::models
