#include "uqbench/hpo/search_space.hpp"

#include "uqbench/errors.hpp"
#include "uqbench/hpo/sobol.hpp"

#include <algorithm>
#include <cmath>

namespace uqb::hpo {

namespace {

int stratum(double u, int count) {
  return std::clamp(static_cast<int>(std::floor(u * count)), 0, count - 1);
}

double unit_position(const Domain& d, double v) {
  if (d.log_scale) return (std::log(v) - std::log(d.lo)) / (std::log(d.hi) - std::log(d.lo));
  return d.hi > d.lo ? (v - d.lo) / (d.hi - d.lo) : 0.0;
}

}  // namespace

SearchSpace& SearchSpace::continuous(const std::string& name, double lo, double hi,
                                     bool log_scale) {
  detail::require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
                  "SearchSpace: '" + name + "' needs lo < hi");
  detail::require(!log_scale || lo > 0.0, "SearchSpace: log-scale '" + name + "' needs lo > 0");
  domains_.push_back({name, DomainKind::kContinuous, lo, hi, log_scale, {}});
  return *this;
}

SearchSpace& SearchSpace::integer(const std::string& name, long lo, long hi) {
  detail::require(lo <= hi, "SearchSpace: '" + name + "' needs lo <= hi");
  domains_.push_back({name, DomainKind::kInteger, static_cast<double>(lo),
                      static_cast<double>(hi), false, {}});
  return *this;
}

SearchSpace& SearchSpace::categorical(const std::string& name, std::vector<std::string> choices) {
  detail::require(!choices.empty(), "SearchSpace: '" + name + "' needs at least one choice");
  const double hi = static_cast<double>(choices.size() - 1);
  domains_.push_back({name, DomainKind::kCategorical, 0.0, hi, false, std::move(choices)});
  return *this;
}

const Domain& SearchSpace::domain(const std::string& name) const {
  for (const Domain& d : domains_) {
    if (d.name == name) return d;
  }
  throw ContractViolation("SearchSpace: unknown hyperparameter '" + name + "'");
}

Config SearchSpace::from_unit(const Eigen::Ref<const Eigen::RowVectorXd>& u) const {
  detail::require(u.size() == size(), "SearchSpace::from_unit: dimension mismatch");
  Config config;
  for (int k = 0; k < size(); ++k) {
    const Domain& d = domains_[static_cast<std::size_t>(k)];
    const double t = std::clamp(u(k), 0.0, 1.0);
    double v = 0.0;
    switch (d.kind) {
      case DomainKind::kContinuous:
        v = d.log_scale ? std::exp(std::log(d.lo) + t * (std::log(d.hi) - std::log(d.lo)))
                        : d.lo + t * (d.hi - d.lo);
        v = std::clamp(v, d.lo, d.hi);
        break;
      case DomainKind::kInteger:
        v = d.lo + stratum(t, static_cast<int>(d.hi - d.lo) + 1);
        break;
      case DomainKind::kCategorical:
        v = stratum(t, static_cast<int>(d.choices.size()));
        break;
    }
    config[d.name] = v;
  }
  return config;
}

std::vector<Config> SearchSpace::sobol_configs(int n, std::uint64_t seed) const {
  detail::require(size() >= 1, "SearchSpace: empty space");
  const Eigen::MatrixXd u = sobol_points(n, size(), seed);
  std::vector<Config> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < u.rows(); ++i) out.push_back(from_unit(u.row(i)));
  return out;
}

Eigen::Index SearchSpace::encoded_dim() const {
  Eigen::Index dim = 0;
  for (const Domain& d : domains_) {
    dim += d.kind == DomainKind::kCategorical ? static_cast<Eigen::Index>(d.choices.size()) : 1;
  }
  return dim;
}

Eigen::RowVectorXd SearchSpace::encode(const Config& config) const {
  validate(config);
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(encoded_dim());
  Eigen::Index at = 0;
  for (const Domain& d : domains_) {
    const double v = config.at(d.name);
    if (d.kind == DomainKind::kCategorical) {
      out(at + static_cast<Eigen::Index>(v)) = 1.0;
      at += static_cast<Eigen::Index>(d.choices.size());
    } else {
      out(at++) = unit_position(d, v);
    }
  }
  return out;
}

void SearchSpace::validate(const Config& config) const {
  for (const Domain& d : domains_) {
    const auto it = config.find(d.name);
    if (it == config.end()) throw ContractViolation("config lacks '" + d.name + "'");
    const double v = it->second;
    if (!std::isfinite(v) || v < d.lo || v > d.hi) {
      throw ContractViolation("config value for '" + d.name + "' is out of range");
    }
    if (d.kind != DomainKind::kContinuous && v != std::floor(v)) {
      throw ContractViolation("config value for '" + d.name + "' must be whole");
    }
  }
}

const std::string& SearchSpace::choice(const Config& config, const std::string& name) const {
  const Domain& d = domain(name);
  detail::require(d.kind == DomainKind::kCategorical, "SearchSpace: '" + name + "' is not categorical");
  const double v = config.at(name);
  detail::require(v >= 0 && v < static_cast<double>(d.choices.size()),
                  "SearchSpace: choice index out of range");
  return d.choices[static_cast<std::size_t>(v)];
}

}  // namespace uqb::hpo
