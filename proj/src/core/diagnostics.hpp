#pragma once

#include "pirm.hpp"

#include <string>
#include <vector>

namespace pirm {

struct OracleResult {
  Vector xhat;
  std::string route;  // "pseudoinverse", "declared-set-projection", "tiny-alpha"
  /// Distance to the tiny-alpha regularized solve, relative to max(1, ||xhat||);
  /// absent when the tiny-alpha solve is the only route.
  std::optional<double> cross_check;
  bool independent_check = false;
};

inline constexpr double kOracleAlpha = 1e-8;
inline constexpr double kOracleAgreement = 1e-4;

/**
 * Reference solution x^* of a consistent system.
 *
 * Hilbert space with affine-linear equations: minimum-norm solution of the
 * stacked system. Declared affine set: metric projection of 0 onto it in a
 * Hilbert space; in l^p only the tiny-alpha solve of sum_i A_i(x) + alpha x = 0
 * is available. Routes with two computations must agree to 1e-4 or the
 * oracle throws. Throws NoOracle when no route applies.
 */
OracleResult min_norm_oracle(const SystemProblem& problem);

/// Solution of sum_i A_i(x) + alpha x = 0.
Vector tiny_alpha_solution(const SystemProblem& problem, double alpha = kOracleAlpha,
                           const InnerConfig& inner = {});

struct VariationalReport {
  double max_value = 0.0;  // max over samples of <xhat, J(xhat - x*)>
  std::size_t worst_sample = 0;
  bool pass = false;
};

VariationalReport variational_inequality_check(const Space& space, const Vector& xhat,
                                               const std::vector<Vector>& solution_samples,
                                               double tol);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double residual = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log(error) against log(alpha) over the last
/// tail_fraction of the entries.
RateFit fit_rate(const std::vector<double>& errors, const std::vector<double>& alphas,
                 double tail_fraction = 0.5);

/// Minimum over the trailing window of max(10, 5% of the length) entries.
double stagnation_floor(const std::vector<double>& errors);

} // namespace pirm
