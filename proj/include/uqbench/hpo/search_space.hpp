#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace uqb::hpo {

/// Named hyperparameter values in natural units. Integers hold whole numbers;
/// categoricals hold the choice index.
using Config = std::map<std::string, double>;

enum class DomainKind { kContinuous, kInteger, kCategorical };

struct Domain {
  std::string name;
  DomainKind kind = DomainKind::kContinuous;
  double lo = 0.0;
  double hi = 1.0;
  bool log_scale = false;
  std::vector<std::string> choices;
};

class SearchSpace {
 public:
  SearchSpace& continuous(const std::string& name, double lo, double hi, bool log_scale = false);
  SearchSpace& integer(const std::string& name, long lo, long hi);
  SearchSpace& categorical(const std::string& name, std::vector<std::string> choices);

  const std::vector<Domain>& domains() const { return domains_; }
  const Domain& domain(const std::string& name) const;
  int size() const { return static_cast<int>(domains_.size()); }

  /// Maps one point of the unit cube (one coordinate per domain) into a
  /// config: log domains interpolate in log space, integers and categoricals
  /// split [0, 1) into equal strata.
  Config from_unit(const Eigen::Ref<const Eigen::RowVectorXd>& u) const;

  /// `n` configs from the scrambled Sobol sequence.
  std::vector<Config> sobol_configs(int n, std::uint64_t seed) const;

  /// Surrogate features: numeric domains rescaled to [0, 1] (log domains in
  /// log space), categoricals one-hot.
  Eigen::RowVectorXd encode(const Config& config) const;
  Eigen::Index encoded_dim() const;

  /// Checks that every domain is present and in range.
  void validate(const Config& config) const;

  /// The chosen label of a categorical domain.
  const std::string& choice(const Config& config, const std::string& name) const;

 private:
  std::vector<Domain> domains_;
};

}  // namespace uqb::hpo
