#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace uqb::hpo {

/// Highest supported dimension.
inline constexpr int kSobolMaxDims = 16;

/// Sobol points with Joe-Kuo direction numbers, skipping the all-zero first
/// point: row k is point k + 1 + skip of the unscrambled sequence. In one
/// dimension the rows start 0.5, 0.75, 0.25, 0.375.
/// A nonzero `seed` applies a random digital shift (XOR) per dimension.
Eigen::MatrixXd sobol_points(int n, int dims, std::uint64_t seed = 0, int skip = 0);

}  // namespace uqb::hpo
