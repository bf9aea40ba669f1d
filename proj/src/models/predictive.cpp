#include "uqbench/models/predictive.hpp"

#include "uqbench/errors.hpp"
#include "uqbench/models/likelihood.hpp"

#include <cmath>
#include <limits>

namespace uqb::models {

GaussianPrediction moment_match(const MixturePrediction& mixture) {
  detail::require(mixture.means.cols() == mixture.weights.size() &&
                      mixture.vars.cols() == mixture.weights.size(),
                  "moment_match: weight count differs from component count");
  GaussianPrediction out;
  out.mean = mixture.means * mixture.weights;
  const Vector second = (mixture.vars.array() + mixture.means.array().square()).matrix() *
                        mixture.weights;
  out.var = (second.array() - out.mean.array().square()).cwiseMax(0.0);
  return out;
}

double mixture_log_density(const Eigen::Ref<const Eigen::RowVectorXd>& means,
                           const Eigen::Ref<const Eigen::RowVectorXd>& vars, const Vector& weights,
                           double y) {
  double top = -std::numeric_limits<double>::infinity();
  Eigen::RowVectorXd terms(weights.size());
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    terms(j) = std::log(weights(j)) + gaussian_log_prob(y, means(j), vars(j));
    top = std::max(top, terms(j));
  }
  if (weights.size() == 1) return terms(0);
  return top + std::log((terms.array() - top).exp().sum());
}

Vector predictive_mean(const Prediction& prediction) {
  if (const auto* g = std::get_if<GaussianPrediction>(&prediction)) return g->mean;
  if (const auto* m = std::get_if<MixturePrediction>(&prediction)) return m->means * m->weights;
  throw ContractViolation("predictive_mean: classification prediction has no mean");
}

Prediction unstandardize(Prediction prediction, double shift, double scale) {
  if (auto* g = std::get_if<GaussianPrediction>(&prediction)) {
    g->mean = (g->mean.array() * scale + shift).matrix();
    g->var *= scale * scale;
  } else if (auto* m = std::get_if<MixturePrediction>(&prediction)) {
    m->means = (m->means.array() * scale + shift).matrix();
    m->vars *= scale * scale;
  }
  return prediction;
}

Eigen::Index prediction_rows(const Prediction& prediction) {
  return std::visit(
      [](const auto& p) -> Eigen::Index {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianPrediction>) return p.mean.size();
        else if constexpr (std::is_same_v<T, MixturePrediction>) return p.means.rows();
        else return p.probs.rows();
      },
      prediction);
}

}  // namespace uqb::models
