#pragma once

#include "uqbench/hpo/search_space.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace uqb::hpo {

/// Closed-form EI for minimization: (best - mu) Phi(z) + sigma phi(z) with
/// z = (best - mu) / sigma, and max(best - mu, 0) when sigma is 0.
double expected_improvement(double mu, double sigma, double best);

enum class TrialStatus { kCompleted, kFailed };

struct TrialRecord {
  int index = 0;
  Config config;
  double objective = 0.0;
  TrialStatus status = TrialStatus::kCompleted;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::string error;  ///< set for failed trials
  /// Lowest completed objective up to and including this trial; +inf before
  /// the first success.
  double incumbent = 0.0;
};

struct TuneOptions {
  int trials = 20;
  int init = 5;
  std::uint64_t seed = 0;
  int candidates = 1024;
  /// Subtracted from the standardized incumbent.
  double ei_jitter = 0.01;
  int surrogate_steps = 100;
  double surrogate_lr = 0.05;
};

struct TuneResult {
  TrialRecord best;
  std::vector<TrialRecord> history;
};

/// Receives the config and a per-trial seed; lower is better.
using Objective = std::function<double(const Config&, std::uint64_t)>;

/// Sobol initialization followed by EI-guided trials on an exact GP
/// surrogate fitted to the standardized objective values. A trial whose
/// objective throws NumericError or returns a non-finite value is recorded as
/// failed and left out of the surrogate.
TuneResult tune(const Objective& objective, const SearchSpace& space,
                const TuneOptions& options = {});

}  // namespace uqb::hpo
