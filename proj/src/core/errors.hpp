#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pirm {

/// A precondition of a library call was not met (bad dimension, negative
/// parameter, ...). Always a caller bug.
class ContractViolation : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The operator variant does not support the requested capability
/// (e.g. a derivative of a projection at a kink).
class CapabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative inner solver stopped before reaching its tolerance.
class InnerSolveError : public std::runtime_error {
public:
  InnerSolveError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what), last_residual_(last_residual),
        iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double last_residual_;
  int iterations_;
};

/// One of the N per-equation subproblems of a parallel step failed.
class StepError : public std::runtime_error {
public:
  StepError(const std::string& what, std::size_t equation)
      : std::runtime_error(what), equation_(equation) {}

  std::size_t equation() const noexcept { return equation_; }

private:
  std::size_t equation_;
};

/// Raised by the stopping rule when no iteration index is admissible.
class NoAdmissibleIndex : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// No route exists to compute the reference solution for a problem.
class NoOracle : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace pirm
