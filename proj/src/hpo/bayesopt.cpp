#include "uqbench/hpo/bayesopt.hpp"

#include "uqbench/errors.hpp"
#include "uqbench/gp/exact_gp.hpp"
#include "uqbench/metrics/normal.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace uqb::hpo {

namespace {

struct Surrogate {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  double best = 0.0;
};

Surrogate fit_and_predict(const SearchSpace& space, const std::vector<TrialRecord>& history,
                          const std::vector<Config>& candidates, const TuneOptions& options) {
  std::vector<const TrialRecord*> done;
  for (const TrialRecord& t : history) {
    if (t.status == TrialStatus::kCompleted) done.push_back(&t);
  }
  const auto n = static_cast<Eigen::Index>(done.size());
  Eigen::MatrixXd x(n, space.encoded_dim());
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = space.encode(done[static_cast<std::size_t>(i)]->config);
    y(i) = done[static_cast<std::size_t>(i)]->objective;
  }
  const double mu = y.mean();
  const double sd = n > 1 ? std::sqrt((y.array() - mu).square().sum() / static_cast<double>(n - 1)) : 0.0;
  const Eigen::VectorXd z = (y.array() - mu) / (sd > 0.0 ? sd : 1.0);

  Eigen::MatrixXd xq(static_cast<Eigen::Index>(candidates.size()), space.encoded_dim());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    xq.row(static_cast<Eigen::Index>(i)) = space.encode(candidates[i]);
  }

  gp::ExactGP model(x, z, gp::RBFKernel(space.encoded_dim(), false, 0.5, 1.0), 0.1, 0.0);
  try {
    model.fit({options.surrogate_steps, options.surrogate_lr});
  } catch (const NumericError&) {
    model = gp::ExactGP(x, z, gp::RBFKernel(space.encoded_dim(), false, 0.5, 1.0), 0.1, 0.0);
  }
  const gp::GaussianMarginals post = model.posterior(xq);
  return {post.mean, post.var.cwiseMax(0.0).cwiseSqrt(), z.minCoeff()};
}

}  // namespace

double expected_improvement(double mu, double sigma, double best) {
  detail::require(sigma >= 0.0, "expected_improvement: sigma must be >= 0");
  const double gain = best - mu;
  if (sigma == 0.0) return std::max(gain, 0.0);
  const double z = gain / sigma;
  return std::max(gain * metrics::normal_cdf(z) + sigma * metrics::normal_pdf(z), 0.0);
}

TuneResult tune(const Objective& objective, const SearchSpace& space, const TuneOptions& options) {
  detail::require(options.init >= 1 && options.trials >= options.init,
                  "tune: need trials >= init >= 1");
  detail::require(options.candidates >= 1, "tune: need at least one candidate");
  detail::require(space.size() >= 1, "tune: empty search space");

  std::mt19937_64 rng(options.seed);
  // Zero would disable the digital shift.
  auto shift_seed = [&rng]() { return rng() | 1u; };
  const std::vector<Config> initial = space.sobol_configs(options.init, shift_seed());

  TuneResult result;
  double incumbent = std::numeric_limits<double>::infinity();
  for (int t = 0; t < options.trials; ++t) {
    TrialRecord record;
    record.index = t;
    record.seed = rng();
    const bool have_data = incumbent < std::numeric_limits<double>::infinity();
    if (t < options.init || !have_data) {
      record.config = t < options.init ? initial[static_cast<std::size_t>(t)]
                                       : space.sobol_configs(1, shift_seed()).front();
    } else {
      const std::vector<Config> candidates = space.sobol_configs(options.candidates, shift_seed());
      const Surrogate s = fit_and_predict(space, result.history, candidates, options);
      std::size_t pick = 0;
      double best_ei = -1.0;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double ei = expected_improvement(s.mean(static_cast<Eigen::Index>(i)),
                                               s.std(static_cast<Eigen::Index>(i)),
                                               s.best - options.ei_jitter);
        if (ei > best_ei) {
          best_ei = ei;
          pick = i;
        }
      }
      record.config = candidates[pick];
    }

    const auto start = std::chrono::steady_clock::now();
    try {
      record.objective = objective(record.config, record.seed);
      if (!std::isfinite(record.objective)) {
        record.status = TrialStatus::kFailed;
        record.error = "non-finite objective";
      }
    } catch (const NumericError& e) {
      record.status = TrialStatus::kFailed;
      record.error = e.what();
    }
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (record.status == TrialStatus::kCompleted && record.objective < incumbent) {
      incumbent = record.objective;
      result.best = record;
    }
    record.incumbent = incumbent;
    result.history.push_back(record);
  }
  if (!(incumbent < std::numeric_limits<double>::infinity())) {
    throw std::runtime_error("no successful trials");
  }
  result.best.incumbent = incumbent;
  return result;
}

}  // namespace uqb::hpo
