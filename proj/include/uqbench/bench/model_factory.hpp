#pragma once

#include "uqbench/bench/config.hpp"
#include "uqbench/diff/parameter.hpp"
#include "uqbench/diff/tape.hpp"
#include "uqbench/models/likelihood.hpp"
#include "uqbench/models/predictive.hpp"

#include <memory>
#include <random>

namespace uqb::bench {

/// What the trainer needs from any of the three model families.
class Model {
 public:
  virtual ~Model() = default;

  /// Negative training objective per data point on one batch drawn from a
  /// training set of `n_total` rows.
  virtual diff::Var loss(diff::Tape& tape, const diff::Matrix& x, const diff::Vector& y,
                         double n_total, std::mt19937_64& rng) = 0;
  virtual models::Prediction predict(const diff::Matrix& x, std::uint64_t seed) = 0;
  virtual diff::ParameterList parameters() = 0;
};

std::unique_ptr<Model> make_model(const ExperimentConfig& config, models::TaskKind task,
                                  int num_classes, const diff::Matrix& x_train,
                                  std::uint64_t seed);

}  // namespace uqb::bench
