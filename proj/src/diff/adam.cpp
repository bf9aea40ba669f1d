#include "uqbench/diff/adam.hpp"

#include "uqbench/errors.hpp"

#include <cmath>

namespace uqb::diff {

AdamState make_adam_state(std::span<Parameter* const> params, AdamOptions options) {
  AdamState state;
  state.options = options;
  for (const Parameter* p : params) {
    state.first_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
    state.second_moment.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
  return state;
}

void adam_step(std::span<Parameter* const> params, AdamState& state, double lr) {
  detail::require(lr > 0.0, "adam_step: learning rate must be positive");
  detail::require(state.first_moment.size() == params.size() &&
                      state.second_moment.size() == params.size(),
                  "adam_step: state does not match parameter count");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = *params[i];
    detail::require(p.grad().rows() == p.rows() && p.grad().cols() == p.cols() &&
                        state.first_moment[i].rows() == p.rows() &&
                        state.first_moment[i].cols() == p.cols(),
                    "adam_step: shape mismatch for parameter '" + p.name() + "'");
  }

  state.step += 1;
  const AdamOptions& o = state.options;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (!p.trainable()) continue;
    const Matrix& g = p.grad();
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseAbs2();
    const auto m_hat = m.array() / correction1;
    const auto v_hat = v.array() / correction2;
    p.raw().array() -= lr * m_hat / (v_hat.sqrt() + o.epsilon);
  }
}

Adam::Adam(ParameterList params, double lr, AdamOptions options)
    : params_(std::move(params)), state_(make_adam_state(params_, options)), lr_(lr) {
  detail::require(lr > 0.0, "Adam: learning rate must be positive");
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

}  // namespace uqb::diff
