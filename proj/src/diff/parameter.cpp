#include "uqbench/diff/parameter.hpp"

#include "uqbench/errors.hpp"

namespace uqb::diff {

Parameter::Parameter(std::string name, const Matrix& value, Transform transform, bool trainable)
    : name_(std::move(name)), transform_(transform), trainable_(trainable) {
  set_value(value);
  zero_grad();
}

Matrix Parameter::value() const {
  if (transform_ == Transform::kPositive) return raw_.array().exp().matrix();
  return raw_;
}

void Parameter::set_value(const Matrix& value) {
  if (transform_ == Transform::kPositive) {
    if (!(value.array() > 0.0).all()) {
      throw ContractViolation("Parameter '" + name_ + "': positive parameter needs values > 0");
    }
    raw_ = value.array().log().matrix();
  } else {
    raw_ = value;
  }
  if (grad_.rows() != raw_.rows() || grad_.cols() != raw_.cols()) zero_grad();
}

}  // namespace uqb::diff
