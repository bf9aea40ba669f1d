#include "uqbench/diff/linalg.hpp"

#include "uqbench/errors.hpp"

#include <cmath>
#include <string>

namespace uqb::diff {
namespace {

constexpr double kJitterStart = 1e-8;
constexpr double kJitterMax = 1e-3;

bool try_factor(const Matrix& a, Matrix& lower) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  return lower.allFinite() && (lower.diagonal().array() > 0.0).all();
}

// L^{-T} X L^{-1}
Matrix sandwich_inverse(const Matrix& lower, const Matrix& x) {
  const auto lt = lower.triangularView<Eigen::Lower>().transpose();
  Matrix left = lt.solve(x);
  return lt.solve(left.transpose()).transpose();
}

}  // namespace

CholeskyFactor cholesky_jittered(const Matrix& a) {
  detail::require(a.rows() == a.cols(), "cholesky: matrix must be square");
  detail::require(a.allFinite(), "cholesky: matrix has non-finite entries");
  const Matrix sym = 0.5 * (a + a.transpose());
  CholeskyFactor result;
  if (try_factor(sym, result.lower)) return result;

  const double scale = std::abs(sym.diagonal().mean());
  const double base = scale > 0.0 ? scale : 1.0;
  for (double jitter = kJitterStart * base; jitter <= kJitterMax * base * (1.0 + 1e-12);
       jitter *= 10.0) {
    Matrix shifted = sym;
    shifted.diagonal().array() += jitter;
    if (try_factor(shifted, result.lower)) {
      result.jitter = jitter;
      return result;
    }
  }
  throw NotPositiveDefinite("cholesky: matrix of size " + std::to_string(a.rows()) +
                            " not positive definite after maximum jitter");
}

Var cholesky(const Var& a) {
  CholeskyFactor factor = cholesky_jittered(a.value());
  return a.tape().record("cholesky", std::move(factor.lower), {a},
                         [a](Tape& t, const Matrix& lower, const Matrix& g) {
                           Matrix phi = lower.transpose() * g.triangularView<Eigen::Lower>();
                           phi.triangularView<Eigen::StrictlyUpper>().setZero();
                           phi.diagonal() *= 0.5;
                           const Matrix s = sandwich_inverse(lower, phi);
                           t.accumulate(a, 0.5 * (s + s.transpose()));
                         });
}

Var tri_solve_lower(const Var& lower, const Var& b) {
  detail::require(lower.rows() == lower.cols(), "tri_solve_lower: L must be square");
  detail::require(lower.cols() == b.rows(), "tri_solve_lower: L and B dimensions differ");
  Matrix out = lower.value().triangularView<Eigen::Lower>().solve(b.value());
  return lower.tape().record(
      "tri_solve_lower", std::move(out), {lower, b},
      [lower, b](Tape& t, const Matrix& x, const Matrix& g) {
        Matrix gb = lower.value().triangularView<Eigen::Lower>().transpose().solve(g);
        if (t.requires_grad(lower)) {
          Matrix gl = -(gb * x.transpose());
          gl.triangularView<Eigen::StrictlyUpper>().setZero();
          t.accumulate(lower, gl);
        }
        if (t.requires_grad(b)) t.accumulate(b, gb);
      });
}

Var logdet(const Var& a) {
  CholeskyFactor factor = cholesky_jittered(a.value());
  const double value = 2.0 * factor.lower.diagonal().array().log().sum();
  Matrix lower = std::move(factor.lower);
  return a.tape().record("logdet", Matrix::Constant(1, 1, value), {a},
                         [a, lower](Tape& t, const Matrix&, const Matrix& g) {
                           const Matrix identity = Matrix::Identity(lower.rows(), lower.cols());
                           t.accumulate(a, g(0, 0) * sandwich_inverse(lower, identity));
                         });
}

Var sq_dist(const Var& a, const Var& b) {
  detail::require(a.cols() == b.cols(), "sq_dist: feature dimensions differ (" +
                                            std::to_string(a.cols()) + " vs " +
                                            std::to_string(b.cols()) + ")");
  const Eigen::VectorXd an = a.value().rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.value().rowwise().squaredNorm();
  Matrix out = -2.0 * a.value() * b.value().transpose();
  out.colwise() += an;
  out.rowwise() += bn.transpose();
  out = out.cwiseMax(0.0);
  return a.tape().record("sq_dist", std::move(out), {a, b},
                         [a, b](Tape& t, const Matrix&, const Matrix& g) {
                           if (t.requires_grad(a)) {
                             const Eigen::VectorXd gr = g.rowwise().sum();
                             Matrix ga = 2.0 * (gr.asDiagonal() * a.value() - g * b.value());
                             t.accumulate(a, ga);
                           }
                           if (t.requires_grad(b)) {
                             const Eigen::VectorXd gc = g.colwise().sum().transpose();
                             Matrix gb =
                                 2.0 * (gc.asDiagonal() * b.value() - g.transpose() * a.value());
                             t.accumulate(b, gb);
                           }
                         });
}

Var lower_from_raw(const Var& raw) {
  detail::require(raw.rows() == raw.cols(), "lower_from_raw: matrix must be square");
  Matrix out = raw.value().triangularView<Eigen::StrictlyLower>();
  out.diagonal() = raw.value().diagonal().array().exp().matrix();
  return raw.tape().record("lower_from_raw", std::move(out), {raw},
                           [raw](Tape& t, const Matrix& value, const Matrix& g) {
                             Matrix gr = g.triangularView<Eigen::StrictlyLower>();
                             gr.diagonal() = g.diagonal().cwiseProduct(value.diagonal());
                             t.accumulate(raw, gr);
                           });
}

}  // namespace uqb::diff
