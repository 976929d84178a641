#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synccool {

/// Raised when a physical or numerical parameter is outside its domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an input violates a structural invariant (shape, Hermiticity).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A covariance matrix had an eigenvalue below the repair tolerance.
class PsdViolation : public std::runtime_error {
 public:
  PsdViolation(const std::string& what, double worst_eigenvalue)
      : std::runtime_error(what), worst_eigenvalue_(worst_eigenvalue) {}

  double worst_eigenvalue() const noexcept { return worst_eigenvalue_; }

 private:
  double worst_eigenvalue_;
};

/// NaN or Inf detected while integrating.
class NumericalBlowup : public std::runtime_error {
 public:
  static constexpr std::size_t kNoTrajectory = static_cast<std::size_t>(-1);

  NumericalBlowup(const std::string& what, double time, std::size_t step,
                  std::size_t trajectory = kNoTrajectory)
      : std::runtime_error(what), time_(time), step_(step), trajectory_(trajectory) {}

  double time() const noexcept { return time_; }
  std::size_t step() const noexcept { return step_; }
  std::size_t trajectory() const noexcept { return trajectory_; }

 private:
  double time_;
  std::size_t step_;
  std::size_t trajectory_;
};

/// The friction coefficient never changes sign, so there is no separatrix.
class NoSeparatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace synccool
