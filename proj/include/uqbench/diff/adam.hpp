#pragma once

#include "uqbench/diff/parameter.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace uqb::diff {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::int64_t step = 0;
  AdamOptions options;
};

/// Zeroed moments shaped like `params`.
AdamState make_adam_state(std::span<Parameter* const> params, AdamOptions options = {});

/// One bias-corrected Adam update of every trainable parameter's raw storage
/// from its current grad():
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
///   raw <- raw - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
/// Frozen parameters keep their values but the step counter still advances.
void adam_step(std::span<Parameter* const> params, AdamState& state, double lr);

/// Owns the parameter list and state; the common way trainers use Adam.
class Adam {
 public:
  Adam(ParameterList params, double lr, AdamOptions options = {});

  void step() { adam_step(params_, state_, lr_); }
  void zero_grad();
  const AdamState& state() const { return state_; }
  const ParameterList& parameters() const { return params_; }

 private:
  ParameterList params_;
  AdamState state_;
  double lr_;
};

}  // namespace uqb::diff
