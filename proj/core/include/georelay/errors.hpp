#pragma once

#include <stdexcept>
#include <string>

namespace georelay {

/// Raised when an optimization problem has no feasible point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bit target above what a window can carry at full power.
class InfeasibleTargetError : public InfeasibleError {
 public:
  InfeasibleTargetError(const std::string& what, double max_bits)
      : InfeasibleError(what), max_bits_(max_bits) {}

  double max_bits() const noexcept { return max_bits_; }

 private:
  double max_bits_;
};

/// Malformed scenario or configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A post-condition that the solvers guarantee did not hold.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace georelay
