#pragma once

#include <stdexcept>
#include <string>

namespace sparsest {

// Invalid argument to a library call (non-positive gamma, T out of range, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain of the quantity (zero signal, non-PSD matrix).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The sketch carries no information about the Euclidean scale (T2 estimate is 0).
class DegenerateSketchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A confidence-interval hypothesis such as eta_n < 1 does not hold.
class HypothesisViolation : public std::invalid_argument {
 public:
  HypothesisViolation(const std::string& parameter, double value, const std::string& detail)
      : std::invalid_argument(detail), parameter_(parameter), value_(value) {}

  const std::string& parameter() const noexcept { return parameter_; }
  double value() const noexcept { return value_; }

 private:
  std::string parameter_;
  double value_;
};

class BudgetUndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoNullSpaceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when the randomized null-space construction exhausts its retries.
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, double best_sparsity, int attempts)
      : std::runtime_error(what), best_sparsity_(best_sparsity), attempts_(attempts) {}

  double best_sparsity() const noexcept { return best_sparsity_; }
  int attempts() const noexcept { return attempts_; }

 private:
  double best_sparsity_;
  int attempts_;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sparsest
