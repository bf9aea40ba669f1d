#pragma once

#include "uqbench/diff/parameter.hpp"
#include "uqbench/diff/tape.hpp"

namespace uqb::models {

using diff::Matrix;
using diff::Var;
using diff::Vector;

enum class TaskKind { kRegression, kClassification };

/// log N(y | mu, var) = -0.5 log(2 pi var) - (y - mu)^2 / (2 var). Requires var > 0.
double gaussian_log_prob(double y, double mu, double var);

/// Elementwise differentiable form; shapes broadcast.
Var gaussian_log_prob(const Var& y, const Var& mu, const Var& var);

/// Probabilities below this are clamped before taking logs.
inline constexpr double kProbabilityFloor = 1e-300;

/// softmax(f^T W) for a single latent vector f of length D and mixing matrix
/// W (D x C). Stabilized by max subtraction; entries are clamped at
/// kProbabilityFloor.
Vector softmax_probs(const Vector& f, const Matrix& mixing);

/// p(y | f) = N(y | f, noise_std^2), noise_std log-parameterized.
class GaussianLikelihood {
 public:
  explicit GaussianLikelihood(double noise_std = 0.3);

  double noise_var() const;
  Var noise_var(diff::Tape& tape);

  /// E_{f ~ N(mean, var)} log N(y | f, s^2) = log N(y | mean, s^2) - var / (2 s^2), per row.
  Var expected_log_prob(diff::Tape& tape, const Var& y, const Var& mean, const Var& var);

  diff::Parameter& noise_parameter() { return noise_; }
  diff::ParameterList parameters() { return {&noise_}; }

 private:
  diff::Parameter noise_;
};

/// p(y | f) = Softmax(f W) with a fixed identity mixing matrix, so the latent
/// width equals the class count.
class SoftmaxLikelihood {
 public:
  explicit SoftmaxLikelihood(int num_classes);

  int num_classes() const { return num_classes_; }
  const Matrix& mixing() const { return mixing_; }

  /// Row-wise log class probabilities for latent rows `f` (B x D).
  Var log_probs(diff::Tape& tape, const Var& f) const;
  /// Row-wise class probabilities, clamped at kProbabilityFloor.
  Matrix probs(const Matrix& f) const;

 private:
  int num_classes_;
  Matrix mixing_;
};

}  // namespace uqb::models
