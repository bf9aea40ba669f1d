#include "uqbench/models/likelihood.hpp"

#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"

#include <cmath>
#include <numbers>

namespace uqb::models {

namespace {
const double kLog2Pi = std::log(2.0 * std::numbers::pi);
}

double gaussian_log_prob(double y, double mu, double var) {
  detail::require(var > 0.0, "gaussian_log_prob: variance must be positive");
  const double r = y - mu;
  return -0.5 * (kLog2Pi + std::log(var)) - r * r / (2.0 * var);
}

Var gaussian_log_prob(const Var& y, const Var& mu, const Var& var) {
  detail::require((var.value().array() > 0.0).all(),
                  "gaussian_log_prob: variance must be positive");
  const Var r = y - mu;
  return (diff::log(var) + kLog2Pi) * -0.5 - diff::square(r) / (var * 2.0);
}

Vector softmax_probs(const Vector& f, const Matrix& mixing) {
  detail::require(mixing.rows() == f.size(), "softmax_probs: latent size does not match W");
  const Vector logits = mixing.transpose() * f;
  const Vector shifted = logits.array() - logits.maxCoeff();
  Vector p = shifted.array().exp();
  p /= p.sum();
  return p.cwiseMax(kProbabilityFloor);
}

GaussianLikelihood::GaussianLikelihood(double noise_std)
    : noise_("likelihood_noise_std", Matrix::Constant(1, 1, noise_std),
             diff::Transform::kPositive) {}

double GaussianLikelihood::noise_var() const { return std::pow(noise_.value()(0, 0), 2); }

Var GaussianLikelihood::noise_var(diff::Tape& tape) { return diff::square(tape.bind(noise_)); }

Var GaussianLikelihood::expected_log_prob(diff::Tape& tape, const Var& y, const Var& mean,
                                          const Var& var) {
  const Var s2 = noise_var(tape);
  return gaussian_log_prob(y, mean, s2) - var / (s2 * 2.0);
}

SoftmaxLikelihood::SoftmaxLikelihood(int num_classes)
    : num_classes_(num_classes), mixing_(Matrix::Identity(num_classes, num_classes)) {
  detail::require(num_classes >= 2, "SoftmaxLikelihood: need at least two classes");
}

Var SoftmaxLikelihood::log_probs(diff::Tape& tape, const Var& f) const {
  detail::require(f.cols() == mixing_.rows(), "SoftmaxLikelihood: latent width does not match W");
  return diff::log_softmax_rows(diff::matmul(f, tape.constant(mixing_)));
}

Matrix SoftmaxLikelihood::probs(const Matrix& f) const {
  detail::require(f.cols() == mixing_.rows(), "SoftmaxLikelihood: latent width does not match W");
  Matrix out(f.rows(), num_classes_);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    out.row(i) = softmax_probs(f.row(i).transpose(), mixing_).transpose();
  }
  return out;
}

}  // namespace uqb::models
