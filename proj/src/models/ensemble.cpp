#include "uqbench/models/ensemble.hpp"

#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"
#include "uqbench/models/deep_gp.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace uqb::models {

using namespace uqb::diff;

MLPMember::MLPMember(Eigen::Index input_dim, const std::vector<int>& hidden, Eigen::Index heads,
                     std::mt19937_64& rng)
    : heads_(heads) {
  detail::require(heads >= 1, "MLPMember: need at least one head");
  std::vector<Eigen::Index> sizes{input_dim};
  for (int h : hidden) {
    detail::require(h >= 1, "MLPMember: hidden widths must be >= 1");
    sizes.push_back(h);
  }
  sizes.push_back(2 * heads);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
    std::uniform_real_distribution<double> init(-bound, bound);
    Matrix w(sizes[l], sizes[l + 1]);
    Matrix b(1, sizes[l + 1]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = init(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = init(rng);
    weights_.emplace_back("weight_" + std::to_string(l), w);
    biases_.emplace_back("bias_" + std::to_string(l), b);
  }
}

MLPMember::Output MLPMember::forward(Tape& tape, const Var& x) {
  Var h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = matmul(h, tape.bind(weights_[l])) + tape.bind(biases_[l]);
    if (l + 1 < weights_.size()) h = relu(h);
  }
  return {slice_cols(h, 0, heads_), softplus(slice_cols(h, heads_, heads_)) + kVarianceHeadFloor};
}

std::pair<Matrix, Matrix> MLPMember::predict(const Matrix& x) {
  Tape tape(false);
  const Output out = forward(tape, tape.constant(x));
  return {out.mean.value(), out.var.value()};
}

diff::ParameterList MLPMember::parameters() {
  diff::ParameterList params;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    params.push_back(&weights_[l]);
    params.push_back(&biases_[l]);
  }
  return params;
}

Var gaussian_nll_sum(const Var& y, const Var& mean, const Var& var) {
  return sum((log(var) + std::log(2.0 * std::numbers::pi)) * 0.5 +
             square(y - mean) / (var * 2.0));
}

Var member_regression_loss(Tape& tape, MLPMember& member, const Matrix& x, const Vector& y) {
  detail::require(x.rows() == y.size(), "member_regression_loss: input and target counts differ");
  const MLPMember::Output out = member.forward(tape, tape.constant(x));
  return gaussian_nll_sum(tape.constant(y), out.mean, out.var);
}

Var member_classification_loss(Tape& tape, MLPMember& member, const Matrix& x,
                               const std::vector<int>& labels) {
  detail::require(x.rows() == static_cast<Eigen::Index>(labels.size()),
                  "member_classification_loss: input and label counts differ");
  const MLPMember::Output out = member.forward(tape, tape.constant(x));
  return -sum(pick(log_softmax_rows(out.mean), labels));
}

GaussianPrediction aggregate_regression(const Matrix& means, const Matrix& vars) {
  detail::require(means.cols() >= 1 && means.rows() == vars.rows() && means.cols() == vars.cols(),
                  "aggregate_regression: member outputs must be N x K with K >= 1");
  const double k = static_cast<double>(means.cols());
  GaussianPrediction out;
  out.mean = means.rowwise().sum() / k;
  const Vector second = (vars.array() + means.array().square()).rowwise().sum() / k;
  out.var = (second.array() - out.mean.array().square()).cwiseMax(0.0);
  return out;
}

Matrix ensemble_classify(const std::vector<std::pair<Matrix, Matrix>>& members,
                         int samples_per_member, std::uint64_t seed) {
  detail::require(!members.empty(), "ensemble_classify: no members");
  detail::require(samples_per_member >= 1, "ensemble_classify: need at least one sample");
  std::mt19937_64 rng(seed);
  const Eigen::Index n = members.front().first.rows();
  const Eigen::Index c = members.front().first.cols();
  Matrix probs = Matrix::Zero(n, c);
  for (const auto& [mean, var] : members) {
    const Matrix sd = var.array().sqrt();
    for (int s = 0; s < samples_per_member; ++s) {
      const Matrix z = mean + (standard_normal(rng, n, c).array() * sd.array()).matrix();
      const Matrix shifted = z.colwise() - z.rowwise().maxCoeff();
      Matrix e = shifted.array().exp();
      e.array().colwise() /= e.rowwise().sum().array();
      probs += e;
    }
  }
  probs /= static_cast<double>(members.size()) * samples_per_member;
  return probs.cwiseMax(kProbabilityFloor);
}

DeepEnsemble::DeepEnsemble(const EnsembleOptions& options, Eigen::Index input_dim,
                           std::mt19937_64& rng)
    : options_(options) {
  detail::require(options.num_models >= 1, "DeepEnsemble: num_models must be >= 1");
  const Eigen::Index heads = options.task == TaskKind::kRegression ? 1 : options.num_classes;
  members_.reserve(static_cast<std::size_t>(options.num_models));
  for (int k = 0; k < options.num_models; ++k) {
    std::mt19937_64 member_rng(rng());
    members_.emplace_back(input_dim, options.hidden, heads, member_rng);
  }
}

Var DeepEnsemble::loss(Tape& tape, const Matrix& x, const Vector& y) {
  detail::require(x.rows() > 0, "DeepEnsemble::loss: empty batch");
  std::vector<int> labels;
  if (options_.task == TaskKind::kClassification) labels = class_indices(y, options_.num_classes);
  Var total = tape.constant(0.0);
  for (MLPMember& m : members_) {
    total = total + (options_.task == TaskKind::kRegression
                         ? member_regression_loss(tape, m, x, y)
                         : member_classification_loss(tape, m, x, labels));
  }
  return total / (static_cast<double>(x.rows()) * static_cast<double>(members_.size()));
}

Prediction DeepEnsemble::predict(const Matrix& x, std::uint64_t seed) {
  std::vector<std::pair<Matrix, Matrix>> outputs;
  for (MLPMember& m : members_) outputs.push_back(m.predict(x));
  if (options_.task == TaskKind::kClassification) {
    return CategoricalPrediction{ensemble_classify(outputs, options_.samples_per_member, seed)};
  }
  Matrix means(x.rows(), static_cast<Eigen::Index>(outputs.size()));
  Matrix vars(x.rows(), static_cast<Eigen::Index>(outputs.size()));
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    means.col(static_cast<Eigen::Index>(k)) = outputs[k].first.col(0);
    vars.col(static_cast<Eigen::Index>(k)) = outputs[k].second.col(0);
  }
  return aggregate_regression(means, vars);
}

diff::ParameterList DeepEnsemble::parameters() {
  diff::ParameterList params;
  for (MLPMember& m : members_) {
    for (Parameter* p : m.parameters()) params.push_back(p);
  }
  return params;
}

}  // namespace uqb::models
