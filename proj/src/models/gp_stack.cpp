#include "uqbench/models/gp_stack.hpp"

#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uqb::models {

Matrix select_inducing(const Matrix& x, int m, std::mt19937_64& rng) {
  detail::require(m >= 1, "select_inducing: need at least one inducing point");
  detail::require(x.rows() >= 1, "select_inducing: no training rows");
  const auto n = static_cast<int>(x.rows());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const int take = std::min(m, n);
  for (int i = 0; i < take; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  Matrix z(m, x.cols());
  for (int i = 0; i < take; ++i) z.row(i) = x.row(order[static_cast<std::size_t>(i)]);
  std::normal_distribution<double> jitter(0.0, 0.01);
  for (int i = take; i < m; ++i) {
    z.row(i) = x.row(order[static_cast<std::size_t>(i % n)]);
    for (Eigen::Index c = 0; c < x.cols(); ++c) z(i, c) += jitter(rng);
  }
  return z;
}

Matrix pca_projection(const Matrix& x, Eigen::Index width) {
  const Eigen::Index d = x.cols();
  if (width >= d) {
    Matrix p = Matrix::Zero(d, width);
    p.leftCols(d).setIdentity();
    return p;
  }
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  Matrix p(d, width);
  for (Eigen::Index k = 0; k < width; ++k) {
    // Eigen sorts ascending.
    Vector v = eig.eigenvectors().col(d - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    p.col(k) = v;
  }
  return p;
}

LayerStack::LayerStack(const StackOptions& options, const Matrix& x_train, std::mt19937_64& rng)
    : options_(options) {
  detail::require(x_train.cols() == options.input_dim,
                  "LayerStack: training inputs do not match input_dim");
  detail::require(options.output_width >= 1, "LayerStack: output width must be >= 1");
  for (int w : options.hidden) detail::require(w >= 1, "LayerStack: hidden widths must be >= 1");

  Matrix data = x_train;
  Matrix z = select_inducing(x_train, options.num_inducing, rng);
  Eigen::Index in_dim = options.input_dim;
  auto make_options = [&](Eigen::Index width) {
    gp::SVGPLayerOptions o;
    o.input_dim = in_dim;
    o.width = width;
    o.ard = options.ard;
    o.init_lengthscale = std::sqrt(static_cast<double>(in_dim));
    return o;
  };
  for (int w : options.hidden) {
    gp::SVGPLayer layer(make_options(w), z);
    const Matrix p = pca_projection(data, w);
    layer.use_linear_mean(p);
    layers_.push_back(std::move(layer));
    data = data * p;
    z = z * p;
    in_dim = w;
  }
  gp::SVGPLayer out(make_options(options.output_width), z);
  out.use_constant_mean(options.output_mean_init);
  layers_.push_back(std::move(out));
}

gp::LayerMarginals LayerStack::propagate(diff::Tape& tape, const Var& x,
                                         std::span<const Var> hidden_noise) {
  detail::require(hidden_noise.size() == num_hidden(),
                  "LayerStack::propagate: need one noise term per hidden layer");
  Var h = x;
  for (std::size_t l = 0; l < num_hidden(); ++l) {
    const gp::LayerMarginals q = layers_[l].marginals(tape, h);
    h = q.mean + hidden_noise[l] * diff::sqrt(q.var);
  }
  return layers_.back().marginals(tape, h);
}

Var LayerStack::kl(diff::Tape& tape) {
  Var total = layers_.front().kl(tape);
  for (std::size_t l = 1; l < layers_.size(); ++l) total = total + layers_[l].kl(tape);
  return total;
}

diff::ParameterList LayerStack::parameters() {
  diff::ParameterList params;
  for (gp::SVGPLayer& layer : layers_) {
    for (diff::Parameter* p : layer.parameters()) params.push_back(p);
  }
  return params;
}

}  // namespace uqb::models
