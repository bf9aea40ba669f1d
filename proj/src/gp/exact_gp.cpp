#include "uqbench/gp/exact_gp.hpp"

#include "uqbench/diff/adam.hpp"
#include "uqbench/diff/linalg.hpp"
#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"

#include <cmath>
#include <numbers>

namespace uqb::gp {

ExactGP::ExactGP(Matrix x, Vector y, RBFKernel kernel, double noise_std)
    : ExactGP(std::move(x), y, std::move(kernel), noise_std, y.size() > 0 ? y.mean() : 0.0) {}

ExactGP::ExactGP(Matrix x, Vector y, RBFKernel kernel, double noise_std, double mean)
    : x_(std::move(x)),
      y_(std::move(y)),
      kernel_(std::move(kernel)),
      noise_("noise_std", Matrix::Constant(1, 1, noise_std), diff::Transform::kPositive),
      mean_("mean_constant", Matrix::Constant(1, 1, mean)) {
  detail::require(x_.rows() >= 1, "ExactGP: need at least one training point");
  detail::require(x_.rows() == y_.size(), "ExactGP: input and target counts differ");
  detail::require(noise_std > 0.0, "ExactGP: noise must be positive");
}

diff::ParameterList ExactGP::parameters() {
  diff::ParameterList params = kernel_.parameters();
  params.push_back(&noise_);
  params.push_back(&mean_);
  return params;
}

Var ExactGP::log_marginal_likelihood(diff::Tape& tape) {
  const auto n = x_.rows();
  const Var x = tape.constant(x_);
  const Var noise = tape.bind(noise_);
  const Var k = kernel_(tape, x, x) + tape.constant(Matrix::Identity(n, n)) * diff::square(noise);
  const Var lower = diff::cholesky(k);
  const Var residual = tape.constant(y_) - tape.bind(mean_);
  const Var alpha = diff::tri_solve_lower(lower, residual);
  const double constant = 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  return diff::sum(diff::square(alpha)) * -0.5 - diff::sum(diff::log(diff::diag(lower))) -
         constant;
}

double ExactGP::log_marginal_likelihood() {
  diff::Tape tape(false);
  return log_marginal_likelihood(tape).item();
}

GaussianMarginals ExactGP::posterior(const Matrix& xq, bool observation_noise) const {
  detail::require(xq.cols() == x_.cols(), "ExactGP::posterior: query dimension differs");
  const RBFParams params = kernel_.params();
  const double noise_var = std::pow(noise_std(), 2);
  Matrix k = rbf_kernel(x_, x_, params);
  k.diagonal().array() += noise_var;
  const diff::CholeskyFactor factor = diff::cholesky_jittered(k);
  const auto lower = factor.lower.triangularView<Eigen::Lower>();

  const Vector residual = y_.array() - mean_constant();
  const Vector alpha = lower.transpose().solve(lower.solve(residual));
  const Matrix kxq = rbf_kernel(x_, xq, params);
  const Matrix v = lower.solve(kxq);

  GaussianMarginals out;
  out.mean = (kxq.transpose() * alpha).array() + mean_constant();
  out.var = (params.outputscale - v.colwise().squaredNorm().array()).matrix().transpose();
  out.var = out.var.cwiseMax(1e-15 * params.outputscale);
  if (observation_noise) out.var.array() += noise_var;
  return out;
}

void ExactGP::fit(const ExactGPFitOptions& options) {
  diff::Adam adam(parameters(), options.learning_rate);
  for (int step = 0; step < options.steps; ++step) {
    diff::Tape tape;
    const Var loss = -log_marginal_likelihood(tape);
    tape.backward(loss);
    adam.step();
  }
}

}  // namespace uqb::gp
