#pragma once

#include <Eigen/Dense>

namespace uqb::gp {

/// Independent Gaussian marginals, one per query point.
struct GaussianMarginals {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
};

}  // namespace uqb::gp
