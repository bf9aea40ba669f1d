#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace uqb::shift {

enum class PerturbationKind {
  kGaussianNoise,
  kFeatureMasking,
  kFeatureScaling,
  kFeaturePermutation,
  kOutlierInjection,
};

inline constexpr std::array<PerturbationKind, 5> kAllPerturbations{
    PerturbationKind::kGaussianNoise, PerturbationKind::kFeatureMasking,
    PerturbationKind::kFeatureScaling, PerturbationKind::kFeaturePermutation,
    PerturbationKind::kOutlierInjection};

std::string_view to_string(PerturbationKind kind);
/// Inverse of to_string; unknown names are a ContractViolation.
PerturbationKind parse_perturbation(std::string_view name);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kGaussianNoise;
  double severity = 0.0;
  std::uint64_t seed = 0;
  /// Per-feature training-split std; needed by noise and outlier kinds.
  Eigen::VectorXd feature_stds;
};

/// Returns a perturbed copy of `x` (N x D). Severity 0 returns `x` unchanged.
///   gaussian_noise:      x_ij + N(0, (sigma_j s)^2)
///   feature_masking:     x_ij -> 0 with probability s
///   feature_scaling:     (1 + s) x
///   feature_permutation: cells opt in w.p. s and swap values within their column
///   outlier_injection:   x_ij + (+-3 sigma_j), sign uniform, w.p. s
Eigen::MatrixXd perturb(const Eigen::MatrixXd& x, const PerturbationSpec& spec);

/// Evaluation severities, ascending.
inline constexpr std::array<double, 6> kSeveritySchedule{0.0, 0.1, 0.2, 0.4, 0.6, 0.8};
inline constexpr const std::array<double, 6>& severity_schedule() { return kSeveritySchedule; }

}  // namespace uqb::shift
