#include "uqbench/gp/kernel.hpp"

#include "uqbench/diff/linalg.hpp"
#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"

#include <string>

namespace uqb::gp {

Matrix rbf_kernel(const Matrix& x, const Matrix& x2, const RBFParams& params) {
  detail::require(x.cols() == x2.cols(), "rbf_kernel: feature dimensions differ (" +
                                             std::to_string(x.cols()) + " vs " +
                                             std::to_string(x2.cols()) + ")");
  detail::require(params.lengthscales.size() == 1 || params.lengthscales.size() == x.cols(),
                  "rbf_kernel: lengthscale count must be 1 or D");
  detail::require((params.lengthscales.array() > 0.0).all() && params.outputscale > 0.0,
                  "rbf_kernel: lengthscales and outputscale must be positive");
  Matrix xs = x;
  Matrix x2s = x2;
  if (params.ard()) {
    xs = x * params.lengthscales.cwiseInverse().asDiagonal();
    x2s = x2 * params.lengthscales.cwiseInverse().asDiagonal();
  } else {
    xs /= params.lengthscales(0);
    x2s /= params.lengthscales(0);
  }
  Matrix k(x.rows(), x2.rows());
  for (Eigen::Index j = 0; j < x2s.rows(); ++j) {
    k.col(j) = (xs.rowwise() - x2s.row(j)).rowwise().squaredNorm();
  }
  return params.outputscale * (-0.5 * k.array()).exp().matrix();
}

Var rbf_kernel(const Var& x, const Var& x2, const Var& lengthscale, const Var& outputscale) {
  detail::require(x.cols() == x2.cols(), "rbf_kernel: feature dimensions differ (" +
                                             std::to_string(x.cols()) + " vs " +
                                             std::to_string(x2.cols()) + ")");
  const Var xs = x / lengthscale;
  const Var x2s = x2 / lengthscale;
  return outputscale * diff::exp(diff::sq_dist(xs, x2s) * -0.5);
}

RBFKernel::RBFKernel(Eigen::Index input_dim, bool ard, double lengthscale, double outputscale)
    : input_dim_(input_dim),
      lengthscale_("lengthscale", Matrix::Constant(1, ard ? input_dim : 1, lengthscale),
                   diff::Transform::kPositive),
      outputscale_("outputscale", Matrix::Constant(1, 1, outputscale),
                   diff::Transform::kPositive) {
  detail::require(input_dim >= 1, "RBFKernel: input dimension must be >= 1");
}

RBFParams RBFKernel::params() const {
  RBFParams p;
  p.lengthscales = lengthscale_.value().row(0).transpose();
  p.outputscale = outputscale_.value()(0, 0);
  return p;
}

Var RBFKernel::operator()(diff::Tape& tape, const Var& x, const Var& x2) {
  return rbf_kernel(x, x2, tape.bind(lengthscale_), tape.bind(outputscale_));
}

}  // namespace uqb::gp
