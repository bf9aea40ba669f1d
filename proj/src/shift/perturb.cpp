#include "uqbench/shift/perturb.hpp"

#include "uqbench/errors.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace uqb::shift {

std::string_view to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kGaussianNoise: return "gaussian_noise";
    case PerturbationKind::kFeatureMasking: return "feature_masking";
    case PerturbationKind::kFeatureScaling: return "feature_scaling";
    case PerturbationKind::kFeaturePermutation: return "feature_permutation";
    case PerturbationKind::kOutlierInjection: return "outlier_injection";
  }
  throw ContractViolation("unknown perturbation kind");
}

PerturbationKind parse_perturbation(std::string_view name) {
  for (PerturbationKind k : kAllPerturbations) {
    if (to_string(k) == name) return k;
  }
  throw ContractViolation("unknown perturbation kind '" + std::string(name) + "'");
}

Eigen::MatrixXd perturb(const Eigen::MatrixXd& x, const PerturbationSpec& spec) {
  detail::require(spec.severity >= 0.0 && spec.severity <= 1.0,
                  "perturb: severity must lie in [0, 1]");
  const auto kind_name = to_string(spec.kind);
  const double s = spec.severity;
  const bool needs_stds = spec.kind == PerturbationKind::kGaussianNoise ||
                          spec.kind == PerturbationKind::kOutlierInjection;
  if (needs_stds) {
    detail::require(spec.feature_stds.size() == x.cols(),
                    "perturb(" + std::string(kind_name) + "): need one std per feature");
    detail::require((spec.feature_stds.array() >= 0.0).all(),
                    "perturb: feature stds must be non-negative");
  }
  Eigen::MatrixXd out = x;
  if (s == 0.0) return out;

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution hit(s);
  switch (spec.kind) {
    case PerturbationKind::kGaussianNoise: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, j) += spec.feature_stds(j) * s * normal(rng);
      }
      break;
    }
    case PerturbationKind::kFeatureMasking:
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          if (hit(rng)) out(i, j) = 0.0;
        }
      }
      break;
    case PerturbationKind::kFeatureScaling:
      out *= 1.0 + s;
      break;
    case PerturbationKind::kFeaturePermutation: {
      // Cells opt in with probability s; the opted-in cells of a column
      // exchange values through one random permutation.
      std::vector<Eigen::Index> chosen;
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        chosen.clear();
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          if (hit(rng)) chosen.push_back(i);
        }
        std::vector<Eigen::Index> source = chosen;
        std::shuffle(source.begin(), source.end(), rng);
        for (std::size_t k = 0; k < chosen.size(); ++k) out(chosen[k], j) = x(source[k], j);
      }
      break;
    }
    case PerturbationKind::kOutlierInjection: {
      std::bernoulli_distribution sign(0.5);
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          if (!hit(rng)) continue;
          const double delta = 3.0 * spec.feature_stds(j);
          out(i, j) += sign(rng) ? delta : -delta;
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace uqb::shift
