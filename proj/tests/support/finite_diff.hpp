#pragma once

// Central finite-difference oracle for gradient tests. Independent of the
// tape: it only ever evaluates forward values.

#include "uqbench/diff/parameter.hpp"
#include "uqbench/diff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace uqb::testing {

using Objective = std::function<diff::Var(diff::Tape&)>;

struct GradientComparison {
  double relative_error = 0.0;  ///< ||analytic - numeric|| / max(||analytic||, ||numeric||)
  double analytic_norm = 0.0;
  double numeric_norm = 0.0;
};

inline double evaluate(const Objective& objective) {
  diff::Tape tape;
  return objective(tape).item();
}

/// Compares tape gradients of `objective` w.r.t. every trainable parameter's
/// raw storage against central differences with step h.
inline GradientComparison compare_gradients(const diff::ParameterList& params,
                                            const Objective& objective, double h = 1e-5) {
  {
    diff::Tape tape;
    const diff::Var out = objective(tape);
    tape.backward(out);
  }
  double diff_sq = 0.0;
  double analytic_sq = 0.0;
  double numeric_sq = 0.0;
  for (diff::Parameter* p : params) {
    if (!p->trainable()) continue;
    const diff::Matrix analytic = p->grad();
    for (Eigen::Index i = 0; i < p->raw().size(); ++i) {
      double& entry = p->raw().data()[i];
      const double saved = entry;
      entry = saved + h;
      const double up = evaluate(objective);
      entry = saved - h;
      const double down = evaluate(objective);
      entry = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.data()[i];
      diff_sq += (a - numeric) * (a - numeric);
      analytic_sq += a * a;
      numeric_sq += numeric * numeric;
    }
  }
  GradientComparison out;
  out.analytic_norm = std::sqrt(analytic_sq);
  out.numeric_norm = std::sqrt(numeric_sq);
  const double denom = std::max({out.analytic_norm, out.numeric_norm, 1e-12});
  out.relative_error = std::sqrt(diff_sq) / denom;
  return out;
}

inline diff::Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                  double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  diff::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline diff::Matrix random_spd(std::mt19937_64& rng, Eigen::Index n) {
  const diff::Matrix b = random_matrix(rng, n, n);
  return b * b.transpose() + diff::Matrix::Identity(n, n);
}

}  // namespace uqb::testing
