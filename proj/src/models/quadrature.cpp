#include "uqbench/models/quadrature.hpp"

#include "uqbench/errors.hpp"

#include <cmath>

namespace uqb::models {

QuadratureRule gauss_hermite(int q) {
  detail::require(q >= 1, "gauss_hermite: need at least one node");
  // Jacobi matrix of the monic Hermite_e recurrence: zero diagonal, sqrt(k) off it.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = eig.eigenvectors().row(0).transpose().array().square();
  rule.weights /= rule.weights.sum();
  // Symmetrize away eigensolver round-off.
  for (int j = 0; j < q / 2; ++j) {
    const double node = 0.5 * (rule.nodes(q - 1 - j) - rule.nodes(j));
    const double weight = 0.5 * (rule.weights(j) + rule.weights(q - 1 - j));
    rule.nodes(j) = -node;
    rule.nodes(q - 1 - j) = node;
    rule.weights(j) = rule.weights(q - 1 - j) = weight;
  }
  if (q % 2 == 1) rule.nodes(q / 2) = 0.0;
  return rule;
}

}  // namespace uqb::models
