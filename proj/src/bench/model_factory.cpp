#include "uqbench/bench/model_factory.hpp"

#include "uqbench/diff/ops.hpp"
#include "uqbench/errors.hpp"
#include "uqbench/models/deep_gp.hpp"
#include "uqbench/models/dspp.hpp"
#include "uqbench/models/ensemble.hpp"

namespace uqb::bench {

using diff::Matrix;
using diff::Tape;
using diff::Var;
using diff::Vector;

namespace {

class DeepGPModel final : public Model {
 public:
  DeepGPModel(const models::DeepGPOptions& o, const Matrix& x, std::mt19937_64& rng)
      : model_(o, x, rng) {}
  Var loss(Tape& tape, const Matrix& x, const Vector& y, double n_total,
           std::mt19937_64& rng) override {
    return -model_.elbo(tape, x, y, n_total, rng) / n_total;
  }
  models::Prediction predict(const Matrix& x, std::uint64_t seed) override {
    return model_.predict(x, seed);
  }
  diff::ParameterList parameters() override { return model_.parameters(); }

 private:
  models::DeepGP model_;
};

class DSPPModel final : public Model {
 public:
  DSPPModel(const models::DSPPOptions& o, const Matrix& x, std::mt19937_64& rng)
      : model_(o, x, rng) {}
  Var loss(Tape& tape, const Matrix& x, const Vector& y, double n_total,
           std::mt19937_64&) override {
    return -model_.objective(tape, x, y, n_total) / n_total;
  }
  models::Prediction predict(const Matrix& x, std::uint64_t) override { return model_.predict(x); }
  diff::ParameterList parameters() override { return model_.parameters(); }

 private:
  models::DSPP model_;
};

class EnsembleModel final : public Model {
 public:
  EnsembleModel(const models::EnsembleOptions& o, Eigen::Index d, std::mt19937_64& rng)
      : model_(o, d, rng) {}
  Var loss(Tape& tape, const Matrix& x, const Vector& y, double, std::mt19937_64&) override {
    return model_.loss(tape, x, y);
  }
  models::Prediction predict(const Matrix& x, std::uint64_t seed) override {
    return model_.predict(x, seed);
  }
  diff::ParameterList parameters() override { return model_.parameters(); }

 private:
  models::DeepEnsemble model_;
};

}  // namespace

std::unique_ptr<Model> make_model(const ExperimentConfig& c, models::TaskKind task,
                                  int num_classes, const Matrix& x_train, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (c.model == "dgp") {
    models::DeepGPOptions o;
    o.task = task;
    o.num_classes = num_classes;
    o.hidden = c.architecture;
    o.num_inducing = c.num_inducing;
    o.mc_samples = c.mc_samples;
    o.beta = c.beta;
    return std::make_unique<DeepGPModel>(o, x_train, rng);
  }
  if (c.model == "dspp") {
    models::DSPPOptions o;
    o.task = task;
    o.num_classes = num_classes;
    o.hidden = c.architecture;
    o.num_inducing = c.num_inducing;
    o.quadrature_sites = c.quadrature_sites;
    o.beta = c.beta;
    return std::make_unique<DSPPModel>(o, x_train, rng);
  }
  if (c.model == "ensemble") {
    models::EnsembleOptions o;
    o.task = task;
    o.num_classes = num_classes;
    if (!c.architecture.empty()) o.hidden = c.architecture;
    o.num_models = c.num_models;
    return std::make_unique<EnsembleModel>(o, x_train.cols(), rng);
  }
  throw ConfigError("unknown model '" + c.model + "'");
}

}  // namespace uqb::bench
