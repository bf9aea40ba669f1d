#pragma once

#include "uqbench/diff/tape.hpp"

#include <string>
#include <vector>

namespace uqb::diff {

enum class Transform {
  kIdentity,
  /// Stored as log(value); the materialized value is exp(raw) > 0.
  kPositive,
};

/// A named trainable (or frozen) tensor. The optimizer acts on `raw()`; models
/// read `value()` or bind the parameter onto a tape.
class Parameter {
 public:
  Parameter() = default;
  /// `value` is given in natural units and converted to raw storage.
  Parameter(std::string name, const Matrix& value, Transform transform = Transform::kIdentity,
            bool trainable = true);

  const std::string& name() const { return name_; }
  Transform transform() const { return transform_; }
  bool trainable() const { return trainable_; }

  Matrix value() const;
  void set_value(const Matrix& value);

  Matrix& raw() { return raw_; }
  const Matrix& raw() const { return raw_; }
  Matrix& grad() { return grad_; }
  const Matrix& grad() const { return grad_; }
  void zero_grad() { grad_.setZero(raw_.rows(), raw_.cols()); }

  Eigen::Index rows() const { return raw_.rows(); }
  Eigen::Index cols() const { return raw_.cols(); }

 private:
  std::string name_;
  Matrix raw_;
  Matrix grad_;
  Transform transform_ = Transform::kIdentity;
  bool trainable_ = true;
};

using ParameterList = std::vector<Parameter*>;

}  // namespace uqb::diff
