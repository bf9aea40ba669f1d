#pragma once

#include "uqbench/gp/svgp_layer.hpp"

#include <random>
#include <span>
#include <vector>

namespace uqb::models {

using diff::Matrix;
using diff::Var;
using diff::Vector;

struct StackOptions {
  Eigen::Index input_dim = 1;
  /// Hidden layer widths; empty means a single output layer.
  std::vector<int> hidden;
  Eigen::Index output_width = 1;
  int num_inducing = 128;
  bool ard = false;
  double output_mean_init = 0.0;
};

/// The layer structure shared by deep GPs and sigma point processes.
///
/// Hidden layers get a frozen linear mean (PCA of their input on the training
/// data) and inducing points propagated through those projections. The output
/// layer has a learnable constant mean.
class LayerStack {
 public:
  LayerStack(const StackOptions& options, const Matrix& x_train, std::mt19937_64& rng);

  /// Pushes `x` through every hidden layer, taking mu + noise[l] * sigma as the
  /// layer output, and returns the output layer's marginals. `hidden_noise`
  /// has one entry per hidden layer, each broadcastable to rows x width.
  gp::LayerMarginals propagate(diff::Tape& tape, const Var& x, std::span<const Var> hidden_noise);

  /// Sum of every unit's KL term.
  Var kl(diff::Tape& tape);

  std::vector<gp::SVGPLayer>& layers() { return layers_; }
  const std::vector<gp::SVGPLayer>& layers() const { return layers_; }
  gp::SVGPLayer& output() { return layers_.back(); }
  std::size_t num_hidden() const { return layers_.size() - 1; }
  const StackOptions& options() const { return options_; }
  diff::ParameterList parameters();

 private:
  StackOptions options_;
  std::vector<gp::SVGPLayer> layers_;
};

/// `m` rows of `x` drawn without replacement. If m exceeds the row count, all
/// rows are used and the remainder are jittered copies.
Matrix select_inducing(const Matrix& x, int m, std::mt19937_64& rng);

/// D_in x width projection: leading principal directions when width < D_in,
/// identity when equal, identity padded with zero columns when wider.
Matrix pca_projection(const Matrix& x, Eigen::Index width);

}  // namespace uqb::models
