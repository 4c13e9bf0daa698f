#pragma once

#include "operators.hpp"
#include "space.hpp"

#include <functional>
#include <optional>

namespace pirm {

enum class InnerMethod { ContractionFixedPoint, DampedNewton, DirectLinear };

struct InnerConfig {
  double tol = 1e-10;
  int max_iter = 10000;
  /// Forces a method; otherwise picked from the operator structure.
  std::optional<InnerMethod> method;
};

struct InnerResult {
  Vector x;
  double residual = 0.0;
  int iterations = 0;
  InnerMethod method = InnerMethod::DirectLinear;
};

/// Default method for `op`: DirectLinear for affine-linear operators,
/// ContractionFixedPoint for I - T with nonlinear T, DampedNewton otherwise.
InnerMethod select_method(const Operator& op);

/**
 * Solves A(x) + c x = b to ||A(x) + c x - b|| <= cfg.tol (norm of `space`).
 *
 * Throws ContractViolation for c <= 0 and InnerSolveError when the method
 * stalls or exhausts max_iter.
 */
InnerResult solve_regularized(const Operator& op, double c, const Vector& b,
                              const InnerConfig& cfg, const Space& space,
                              const std::optional<Vector>& initial_guess = std::nullopt);

/// Action v -> L v of a linear map on R^dim.
struct LinearAction {
  int dim = 0;
  std::function<Vector(const Vector&)> apply;
};

struct ShiftedSolveResult {
  Vector s;
  double residual = 0.0;
  /// ||s|| <= ||r|| / alpha + tol / alpha held.
  bool resolvent_bound_ok = true;
};

/**
 * Solves (alpha I + L) s = r for the derivative L of an accretive operator.
 * The resolvent bound ||(alpha I + L)^-1|| <= 1/alpha is checked on the
 * result; a violation means L was not accretive and raises ContractViolation.
 */
ShiftedSolveResult solve_shifted_linear(const LinearAction& l, double alpha, const Vector& r,
                                        const InnerConfig& cfg, const Space& space);

/// Dense matrix of a linear action, one column per unit vector.
Matrix assemble(const LinearAction& l);

} // namespace pirm
