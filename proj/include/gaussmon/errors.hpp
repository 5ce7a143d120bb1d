#pragma once

#include <stdexcept>
#include <string>

namespace gaussmon {

/// Raised on violated preconditions and malformed inputs. Maps to CLI exit 2.
class InvalidArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation fails numerically (residual above tolerance,
/// loss of positive definiteness, singular system, bracket failure).
/// Maps to CLI exit 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double detail = 0.0)
      : std::runtime_error(what), detail_(detail) {}

  /// Context-dependent scalar: a residual, a failure time, or an index.
  double detail() const { return detail_; }

 private:
  double detail_;
};

}  // namespace gaussmon
