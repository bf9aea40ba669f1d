#include "uqbench/diff/ops.hpp"

#include "uqbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uqb::diff {
namespace {

using Index = Eigen::Index;

struct Shape {
  Index rows;
  Index cols;
};

Shape broadcast_shape(const Matrix& a, const Matrix& b, const char* op) {
  auto dim = [&](Index x, Index y) {
    if (x == y || y == 1) return x;
    if (x == 1) return y;
    throw ContractViolation(std::string(op) + ": cannot broadcast " + std::to_string(a.rows()) +
                            "x" + std::to_string(a.cols()) + " with " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
  };
  return {dim(a.rows(), b.rows()), dim(a.cols(), b.cols())};
}

Matrix expand(const Matrix& a, Shape s) {
  if (a.rows() == s.rows && a.cols() == s.cols) return a;
  return a.replicate(s.rows / a.rows(), s.cols / a.cols());
}

// Sums an adjoint of the broadcast shape back down to the operand's shape.
Matrix reduce_to(const Matrix& g, Index rows, Index cols) {
  if (g.rows() == rows && g.cols() == cols) return g;
  Matrix r = g;
  if (rows == 1 && r.rows() != 1) r = r.colwise().sum().eval();
  if (cols == 1 && r.cols() != 1) r = r.rowwise().sum().eval();
  return r;
}

template <typename Forward, typename GradA, typename GradB>
Var binary(const char* op, const Var& a, const Var& b, Forward forward, GradA grad_a,
           GradB grad_b) {
  const Shape s = broadcast_shape(a.value(), b.value(), op);
  const Matrix av = expand(a.value(), s);
  const Matrix bv = expand(b.value(), s);
  Matrix out = forward(av.array(), bv.array()).matrix();
  return a.tape().record(op, std::move(out), {a, b},
                         [a, b, grad_a, grad_b](Tape& t, const Matrix& value, const Matrix& g) {
                           const Shape shape{g.rows(), g.cols()};
                           if (t.requires_grad(a)) {
                             const Matrix av = expand(a.value(), shape);
                             const Matrix bv = expand(b.value(), shape);
                             Matrix ga = grad_a(av.array(), bv.array(), value.array(), g.array());
                             t.accumulate(a, reduce_to(ga, a.rows(), a.cols()));
                           }
                           if (t.requires_grad(b)) {
                             const Matrix av = expand(a.value(), shape);
                             const Matrix bv = expand(b.value(), shape);
                             Matrix gb = grad_b(av.array(), bv.array(), value.array(), g.array());
                             t.accumulate(b, reduce_to(gb, b.rows(), b.cols()));
                           }
                         });
}

template <typename Forward, typename Grad>
Var unary(const char* op, const Var& a, Forward forward, Grad grad) {
  Matrix out = forward(a.value().array()).matrix();
  return a.tape().record(op, std::move(out), {a},
                         [a, grad](Tape& t, const Matrix& value, const Matrix& g) {
                           Matrix ga = grad(a.value().array(), value.array(), g.array());
                           t.accumulate(a, ga);
                         });
}

Var scalar_like(const Var& a, double v) { return a.tape().constant(v); }

}  // namespace

Var add(const Var& a, const Var& b) {
  return binary(
      "add", a, b, [](const auto& x, const auto& y) { return x + y; },
      [](const auto&, const auto&, const auto&, const auto& g) { return g.matrix(); },
      [](const auto&, const auto&, const auto&, const auto& g) { return g.matrix(); });
}

Var sub(const Var& a, const Var& b) {
  return binary(
      "sub", a, b, [](const auto& x, const auto& y) { return x - y; },
      [](const auto&, const auto&, const auto&, const auto& g) { return g.matrix(); },
      [](const auto&, const auto&, const auto&, const auto& g) { return (-g).matrix(); });
}

Var mul(const Var& a, const Var& b) {
  return binary(
      "mul", a, b, [](const auto& x, const auto& y) { return x * y; },
      [](const auto&, const auto& y, const auto&, const auto& g) { return (g * y).matrix(); },
      [](const auto& x, const auto&, const auto&, const auto& g) { return (g * x).matrix(); });
}

Var div(const Var& a, const Var& b) {
  return binary(
      "div", a, b, [](const auto& x, const auto& y) { return x / y; },
      [](const auto&, const auto& y, const auto&, const auto& g) { return (g / y).matrix(); },
      [](const auto&, const auto& y, const auto& out, const auto& g) {
        return (-g * out / y).matrix();
      });
}

Var operator+(const Var& a, const Var& b) { return add(a, b); }
Var operator-(const Var& a, const Var& b) { return sub(a, b); }
Var operator*(const Var& a, const Var& b) { return mul(a, b); }
Var operator/(const Var& a, const Var& b) { return div(a, b); }
Var operator+(const Var& a, double b) { return add(a, scalar_like(a, b)); }
Var operator+(double a, const Var& b) { return add(scalar_like(b, a), b); }
Var operator-(const Var& a, double b) { return sub(a, scalar_like(a, b)); }
Var operator-(double a, const Var& b) { return sub(scalar_like(b, a), b); }
Var operator*(const Var& a, double b) { return mul(a, scalar_like(a, b)); }
Var operator*(double a, const Var& b) { return mul(scalar_like(b, a), b); }
Var operator/(const Var& a, double b) { return div(a, scalar_like(a, b)); }

Var operator-(const Var& a) {
  return unary(
      "neg", a, [](const auto& x) { return -x; },
      [](const auto&, const auto&, const auto& g) { return (-g).matrix(); });
}

Var exp(const Var& a) {
  return unary(
      "exp", a, [](const auto& x) { return x.exp(); },
      [](const auto&, const auto& out, const auto& g) { return (g * out).matrix(); });
}

Var log(const Var& a) {
  return unary(
      "log", a, [](const auto& x) { return x.log(); },
      [](const auto& x, const auto&, const auto& g) { return (g / x).matrix(); });
}

Var sqrt(const Var& a) {
  return unary(
      "sqrt", a, [](const auto& x) { return x.sqrt(); },
      [](const auto&, const auto& out, const auto& g) { return (0.5 * g / out).matrix(); });
}

Var square(const Var& a) {
  return unary(
      "square", a, [](const auto& x) { return x.square(); },
      [](const auto& x, const auto&, const auto& g) { return (2.0 * g * x).matrix(); });
}

Var reciprocal(const Var& a) {
  return unary(
      "reciprocal", a, [](const auto& x) { return x.inverse(); },
      [](const auto&, const auto& out, const auto& g) { return (-g * out.square()).matrix(); });
}

Var relu(const Var& a) {
  return unary(
      "relu", a, [](const auto& x) { return x.max(0.0); },
      [](const auto& x, const auto&, const auto& g) {
        return (x > 0.0).select(g, 0.0).matrix();
      });
}

Var softplus(const Var& a) {
  return unary(
      "softplus", a,
      [](const auto& x) { return x.max(0.0) + (-x.abs()).exp().log1p(); },
      [](const auto& x, const auto&, const auto& g) {
        // sigmoid(x), evaluated without overflow for large |x|
        const auto e = (-x.abs()).exp();
        return (g * (x >= 0.0).select(1.0 / (1.0 + e), e / (1.0 + e))).matrix();
      });
}

Var clamp_min(const Var& a, double floor) {
  return unary(
      "clamp_min", a, [floor](const auto& x) { return x.max(floor); },
      [floor](const auto& x, const auto&, const auto& g) {
        return (x > floor).select(g, 0.0).matrix();
      });
}

Var sum(const Var& a) {
  Matrix out = Matrix::Constant(1, 1, a.value().sum());
  return a.tape().record("sum", std::move(out), {a}, [a](Tape& t, const Matrix&, const Matrix& g) {
    t.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var mean(const Var& a) {
  const double n = static_cast<double>(a.value().size());
  return sum(a) / n;
}

Var col_sums(const Var& a) {
  Matrix out = a.value().colwise().sum();
  return a.tape().record("col_sums", std::move(out), {a},
                         [a](Tape& t, const Matrix&, const Matrix& g) {
                           t.accumulate(a, g.replicate(a.rows(), 1));
                         });
}

Var row_sums(const Var& a) {
  Matrix out = a.value().rowwise().sum();
  return a.tape().record("row_sums", std::move(out), {a},
                         [a](Tape& t, const Matrix&, const Matrix& g) {
                           t.accumulate(a, g.replicate(1, a.cols()));
                         });
}

Var matmul(const Var& a, const Var& b) {
  detail::require(a.cols() == b.rows(), "matmul: inner dimensions differ (" +
                                            std::to_string(a.cols()) + " vs " +
                                            std::to_string(b.rows()) + ")");
  Matrix out = a.value() * b.value();
  return a.tape().record("matmul", std::move(out), {a, b},
                         [a, b](Tape& t, const Matrix&, const Matrix& g) {
                           if (t.requires_grad(a)) t.accumulate(a, g * b.value().transpose());
                           if (t.requires_grad(b)) t.accumulate(b, a.value().transpose() * g);
                         });
}

Var transpose(const Var& a) {
  Matrix out = a.value().transpose();
  return a.tape().record("transpose", std::move(out), {a},
                         [a](Tape& t, const Matrix&, const Matrix& g) {
                           t.accumulate(a, g.transpose());
                         });
}

Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols) {
  detail::require(rows * cols == a.value().size(), "reshape: element count changes");
  Matrix out = a.value().reshaped(rows, cols);
  return a.tape().record("reshape", std::move(out), {a},
                         [a](Tape& t, const Matrix&, const Matrix& g) {
                           t.accumulate(a, g.reshaped(a.rows(), a.cols()));
                         });
}

Var diag(const Var& a) {
  detail::require(a.rows() == a.cols(), "diag: matrix must be square");
  Matrix out = a.value().diagonal();
  return a.tape().record("diag", std::move(out), {a}, [a](Tape& t, const Matrix&, const Matrix& g) {
    Matrix ga = Matrix::Zero(a.rows(), a.cols());
    ga.diagonal() = g.col(0);
    t.accumulate(a, ga);
  });
}

Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count) {
  detail::require(start >= 0 && count >= 0 && start + count <= a.rows(),
                  "slice_rows: range out of bounds");
  Matrix out = a.value().middleRows(start, count);
  return a.tape().record("slice_rows", std::move(out), {a},
                         [a, start, count](Tape& t, const Matrix&, const Matrix& g) {
                           Matrix ga = Matrix::Zero(a.rows(), a.cols());
                           ga.middleRows(start, count) = g;
                           t.accumulate(a, ga);
                         });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  detail::require(start >= 0 && count >= 0 && start + count <= a.cols(),
                  "slice_cols: range out of bounds");
  Matrix out = a.value().middleCols(start, count);
  return a.tape().record("slice_cols", std::move(out), {a},
                         [a, start, count](Tape& t, const Matrix&, const Matrix& g) {
                           Matrix ga = Matrix::Zero(a.rows(), a.cols());
                           ga.middleCols(start, count) = g;
                           t.accumulate(a, ga);
                         });
}

Var hconcat(std::span<const Var> parts) {
  detail::require(!parts.empty(), "hconcat: no inputs");
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const Var& p : parts) {
    detail::require(p.rows() == rows, "hconcat: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape().record(
      "hconcat", std::move(out), std::span<const Var>(inputs),
      [inputs](Tape& t, const Matrix&, const Matrix& g) {
        Index offset = 0;
        for (const Var& p : inputs) {
          if (t.requires_grad(p)) t.accumulate(p, g.middleCols(offset, p.cols()));
          offset += p.cols();
        }
      });
}

Var vconcat(std::span<const Var> parts) {
  detail::require(!parts.empty(), "vconcat: no inputs");
  const Index cols = parts.front().cols();
  Index rows = 0;
  for (const Var& p : parts) {
    detail::require(p.cols() == cols, "vconcat: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape().record(
      "vconcat", std::move(out), std::span<const Var>(inputs),
      [inputs](Tape& t, const Matrix&, const Matrix& g) {
        Index offset = 0;
        for (const Var& p : inputs) {
          if (t.requires_grad(p)) t.accumulate(p, g.middleRows(offset, p.rows()));
          offset += p.rows();
        }
      });
}

Var tile_rows(const Var& a, Eigen::Index times) {
  detail::require(times >= 1, "tile_rows: times must be >= 1");
  Matrix out = a.value().replicate(times, 1);
  return a.tape().record("tile_rows", std::move(out), {a},
                         [a, times](Tape& t, const Matrix&, const Matrix& g) {
                           Matrix ga = Matrix::Zero(a.rows(), a.cols());
                           for (Index k = 0; k < times; ++k) ga += g.middleRows(k * a.rows(), a.rows());
                           t.accumulate(a, ga);
                         });
}

Var pick(const Var& a, std::span<const int> index) {
  detail::require(static_cast<Index>(index.size()) == a.rows(), "pick: one index per row required");
  std::vector<int> idx(index.begin(), index.end());
  Matrix out(a.rows(), 1);
  for (Index i = 0; i < a.rows(); ++i) {
    detail::require(idx[i] >= 0 && idx[i] < a.cols(), "pick: index out of range");
    out(i, 0) = a.value()(i, idx[i]);
  }
  return a.tape().record("pick", std::move(out), {a},
                         [a, idx](Tape& t, const Matrix&, const Matrix& g) {
                           Matrix ga = Matrix::Zero(a.rows(), a.cols());
                           for (Index i = 0; i < a.rows(); ++i) ga(i, idx[i]) = g(i, 0);
                           t.accumulate(a, ga);
                         });
}

namespace {

Matrix row_logsumexp(const Matrix& x) {
  const Eigen::VectorXd m = x.rowwise().maxCoeff();
  Eigen::VectorXd s = (x.colwise() - m).array().exp().rowwise().sum().log().matrix();
  return (s + m).eval();
}

}  // namespace

Var logsumexp_rows(const Var& a) {
  Matrix out = row_logsumexp(a.value());
  return a.tape().record("logsumexp_rows", std::move(out), {a},
                         [a](Tape& t, const Matrix& value, const Matrix& g) {
                           Matrix p = (a.value().colwise() - value.col(0)).array().exp().matrix();
                           t.accumulate(a, (p.array().colwise() * g.col(0).array()).matrix());
                         });
}

Var log_softmax_rows(const Var& a) {
  const Matrix lse = row_logsumexp(a.value());
  Matrix out = a.value().colwise() - lse.col(0);
  return a.tape().record("log_softmax_rows", std::move(out), {a},
                         [a](Tape& t, const Matrix& value, const Matrix& g) {
                           const Matrix p = value.array().exp().matrix();
                           const Eigen::VectorXd gs = g.rowwise().sum();
                           t.accumulate(a, g - (p.array().colwise() * gs.array()).matrix());
                         });
}

Var softmax_rows(const Var& a) {
  const Matrix lse = row_logsumexp(a.value());
  Matrix out = (a.value().colwise() - lse.col(0)).array().exp().matrix();
  return a.tape().record("softmax_rows", std::move(out), {a},
                         [a](Tape& t, const Matrix& p, const Matrix& g) {
                           const Eigen::VectorXd inner = (g.array() * p.array()).rowwise().sum();
                           t.accumulate(a, (p.array() * (g.array().colwise() - inner.array())).matrix());
                         });
}

}  // namespace uqb::diff
