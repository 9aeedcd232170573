#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gkaccel {

/// Operand dimensions disagree.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(std::size_t expected, std::size_t got)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(got)) {}
};

/// The requested operation is not defined for this kind of set (e.g. reflecting
/// through a half-space).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A stacked constraint system has no solution.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step-size formula was called on a (numerically) fixed point. Callers take
/// the unit step instead.
class StepRejected : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values appeared in an iterate.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(std::size_t iteration, const std::string& what)
      : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

inline void require_dim(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionError(expected, got);
}

}  // namespace gkaccel
