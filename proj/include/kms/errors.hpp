#pragma once

#include <stdexcept>
#include <string>

namespace kms {

/// A documented precondition of an operation does not hold for its input,
/// for example a multiplier requested for a non-elliptic operator.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A computation produced NaN or infinity.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kms
