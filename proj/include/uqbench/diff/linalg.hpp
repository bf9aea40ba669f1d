#pragma once

#include "uqbench/diff/tape.hpp"

namespace uqb::diff {

struct CholeskyFactor {
  Matrix lower;
  /// Diagonal jitter that had to be added for the factorization to succeed.
  double jitter = 0.0;
};

/// Factors the symmetric part of `a`. Tries no jitter first, then
/// 1e-8 * mean(diag) growing tenfold per retry up to 1e-3 * mean(diag).
/// Throws NotPositiveDefinite when the ladder is exhausted.
CholeskyFactor cholesky_jittered(const Matrix& a);

/// Differentiable Cholesky factor of (a + a^T)/2 (+ ladder jitter). The upper
/// triangle of the result is exactly zero.
Var cholesky(const Var& a);

/// Solves L X = B for lower-triangular L. Only the lower triangle of L is read.
Var tri_solve_lower(const Var& lower, const Var& b);

/// log det(a) for symmetric positive-definite `a`; the adjoint is a^{-1}.
Var logdet(const Var& a);

/// D(i, j) = ||a_i - b_j||^2 between the rows of a (n x d) and b (m x d).
Var sq_dist(const Var& a, const Var& b);

/// Lower-triangular matrix with the strict lower part of `raw` and
/// exp(diag(raw)) on the diagonal; the result always has a positive diagonal.
Var lower_from_raw(const Var& raw);

}  // namespace uqb::diff
