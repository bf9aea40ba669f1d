#pragma once

#include <stdexcept>
#include <string>

namespace uqb {

/// Caller broke a documented precondition (shape mismatch, empty batch, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric routine produced or met a non-finite value, or a factorization failed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Malformed input files. Messages carry the offending row where known.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace detail
}  // namespace uqb
