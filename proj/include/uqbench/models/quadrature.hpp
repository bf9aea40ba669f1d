#pragma once

#include <Eigen/Dense>

namespace uqb::models {

/// Nodes and weights for E_{z ~ N(0,1)}[g(z)] ~= sum_j w_j g(z_j).
struct QuadratureRule {
  Eigen::VectorXd nodes;    ///< ascending
  Eigen::VectorXd weights;  ///< positive, sum to 1
};

/// Probabilists' Gauss-Hermite rule with q nodes (Golub-Welsch). Exact for
/// polynomials of degree <= 2q - 1 under the standard normal.
QuadratureRule gauss_hermite(int q);

}  // namespace uqb::models
