#include "uqbench/models/deep_gp.hpp"

#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"

#include <cmath>
#include <string>

namespace uqb::models {

using namespace uqb::diff;

Matrix standard_normal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = normal(rng);
  return out;
}

std::vector<int> class_indices(const Vector& y, int num_classes) {
  std::vector<int> out(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y(i);
    const int c = static_cast<int>(v);
    if (c != v || c < 0 || c >= num_classes) {
      throw ContractViolation("class label " + std::to_string(v) + " at row " +
                              std::to_string(i) + " is outside [0, " +
                              std::to_string(num_classes) + ")");
    }
    out[static_cast<std::size_t>(i)] = c;
  }
  return out;
}

namespace {

StackOptions stack_options(const DeepGPOptions& o, Eigen::Index input_dim) {
  detail::require(o.mc_samples >= 1, "DeepGP: mc_samples must be >= 1");
  detail::require(o.beta >= 0.0, "DeepGP: beta must be >= 0");
  StackOptions s;
  s.input_dim = input_dim;
  s.hidden = o.hidden;
  s.output_width = o.task == TaskKind::kRegression ? 1 : o.num_classes;
  s.num_inducing = o.num_inducing;
  s.ard = o.ard;
  return s;
}

std::vector<int> tile(const std::vector<int>& labels, int times) {
  std::vector<int> out;
  out.reserve(labels.size() * static_cast<std::size_t>(times));
  for (int s = 0; s < times; ++s) out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

}  // namespace

DeepGP::DeepGP(const DeepGPOptions& options, const Matrix& x_train, std::mt19937_64& rng)
    : options_(options),
      stack_(stack_options(options, x_train.cols()), x_train, rng),
      gaussian_(options.noise_std),
      softmax_(options.task == TaskKind::kRegression ? 2 : options.num_classes) {}

gp::LayerMarginals DeepGP::forward(Tape& tape, const Matrix& x, int samples,
                                   std::mt19937_64& rng) {
  detail::require(samples >= 1, "DeepGP::forward: samples must be >= 1");
  const Eigen::Index rows = x.rows() * samples;
  std::vector<Var> noise;
  for (const gp::SVGPLayer& layer : stack_.layers()) {
    if (noise.size() == stack_.num_hidden()) break;
    noise.push_back(tape.constant(standard_normal(rng, rows, layer.width())));
  }
  return stack_.propagate(tape, tile_rows(tape.constant(x), samples), noise);
}

Var DeepGP::elbo(Tape& tape, const Matrix& x, const Vector& y, double n_total,
                 std::mt19937_64& rng) {
  detail::require(x.rows() > 0, "DeepGP::elbo: empty batch");
  detail::require(x.rows() == y.size(), "DeepGP::elbo: input and target counts differ");
  const int s = options_.mc_samples;
  const gp::LayerMarginals q = forward(tape, x, s, rng);
  Var ell;
  if (options_.task == TaskKind::kRegression) {
    const Var y_paths = tape.constant(y.replicate(s, 1));
    ell = sum(gaussian_.expected_log_prob(tape, y_paths, q.mean, q.var));
  } else {
    const Var f = q.mean + tape.constant(standard_normal(rng, q.mean.rows(), q.mean.cols())) *
                               sqrt(q.var);
    const std::vector<int> labels = tile(class_indices(y, options_.num_classes), s);
    ell = sum(pick(softmax_.log_probs(tape, f), labels));
  }
  const Var data_term = ell * (n_total / (static_cast<double>(x.rows()) * s));
  if (options_.beta == 0.0) return data_term;
  return data_term - stack_.kl(tape) * options_.beta;
}

Prediction DeepGP::predict(const Matrix& x, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tape tape(false);
  const gp::LayerMarginals q = forward(tape, x, samples, rng);
  const Eigen::Index b = x.rows();
  if (options_.task == TaskKind::kRegression) {
    MixturePrediction out;
    out.means = q.mean.value().reshaped(b, samples);
    out.vars = (q.var.value().array() + gaussian_.noise_var()).matrix().reshaped(b, samples);
    out.weights = Vector::Constant(samples, 1.0 / samples);
    return out;
  }
  const Matrix f = q.mean.value() +
                   (standard_normal(rng, q.mean.rows(), q.mean.cols()).array() *
                    q.var.value().array().sqrt())
                       .matrix();
  const Matrix probs = softmax_.probs(f);
  CategoricalPrediction out{Matrix::Zero(b, options_.num_classes)};
  for (int s = 0; s < samples; ++s) out.probs += probs.middleRows(s * b, b);
  out.probs /= static_cast<double>(samples);
  return out;
}

diff::ParameterList DeepGP::parameters() {
  diff::ParameterList params = stack_.parameters();
  if (options_.task == TaskKind::kRegression) params.push_back(&gaussian_.noise_parameter());
  return params;
}

}  // namespace uqb::models
