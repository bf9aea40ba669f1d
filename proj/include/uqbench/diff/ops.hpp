#pragma once

#include "uqbench/diff/tape.hpp"

#include <span>
#include <vector>

namespace uqb::diff {

// Elementwise binary ops broadcast over rank-2 shapes: each dimension must
// match or be 1 on one side.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator+(const Var& a, double b);
Var operator+(double a, const Var& b);
Var operator-(const Var& a, double b);
Var operator-(double a, const Var& b);
Var operator*(const Var& a, double b);
Var operator*(double a, const Var& b);
Var operator/(const Var& a, double b);
Var operator-(const Var& a);

Var exp(const Var& a);
Var log(const Var& a);
Var sqrt(const Var& a);
Var square(const Var& a);
Var reciprocal(const Var& a);
Var relu(const Var& a);
/// log(1 + exp(a)), overflow-safe.
Var softplus(const Var& a);
/// max(a, floor); the adjoint is passed only where a > floor.
Var clamp_min(const Var& a, double floor);

/// Sum of all entries, 1x1.
Var sum(const Var& a);
Var mean(const Var& a);
/// Column sums, 1 x cols.
Var col_sums(const Var& a);
/// Row sums, rows x 1.
Var row_sums(const Var& a);

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
/// Column-major reshape (Eigen storage order).
Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols);
/// Diagonal of a square matrix as a column.
Var diag(const Var& a);

Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count);
Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count);
Var hconcat(std::span<const Var> parts);
Var vconcat(std::span<const Var> parts);
/// Stacks `times` copies of `a` vertically.
Var tile_rows(const Var& a, Eigen::Index times);
/// out(i) = a(i, index[i]), rows x 1.
Var pick(const Var& a, std::span<const int> index);

Var softmax_rows(const Var& a);
Var log_softmax_rows(const Var& a);
/// log sum_j exp(a(i, j)), rows x 1.
Var logsumexp_rows(const Var& a);

}  // namespace uqb::diff
