#pragma once

#include "inner.hpp"
#include "operators.hpp"
#include "schedules.hpp"
#include "space.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pirm {

class WorkerPool;

/// How diagnostics may compute the reference solution of a system.
struct OracleDescriptor {
  enum class Kind {
    None,
    Pseudoinverse,     // stacked linear system, Hilbert space
    DeclaredAffineSet  // solution set = point + span(basis columns)
  };
  Kind kind = Kind::None;
  Vector point;
  Matrix basis;
};

/**
 * System A_i(x) = 0, i = 1..N, over a common space.
 *
 * A known solution, when given, must satisfy max_i ||A_i(x)|| <= 1e-8 max(1, ||x||).
 */
class SystemProblem {
public:
  SystemProblem(Space space, std::vector<Operator> equations,
                std::optional<Vector> known_solution = std::nullopt,
                OracleDescriptor oracle = {});

  const Space& space() const noexcept { return space_; }
  const std::vector<Operator>& equations() const noexcept { return equations_; }
  std::size_t size() const noexcept { return equations_.size(); }
  int dim() const noexcept { return space_.dim(); }
  const std::optional<Vector>& known_solution() const noexcept { return known_solution_; }
  const OracleDescriptor& oracle() const noexcept { return oracle_; }

  /// sum_i A_i as a single operator.
  Operator sum_operator() const;
  double max_residual(const Vector& x) const;

  SystemProblem with_known_solution(Vector xhat) const;
  /// Same space and reference solution, new operators (e.g. noisy data).
  /// The reference solution is kept for error reporting only; consistency is
  /// not re-checked.
  SystemProblem with_equations(std::vector<Operator> equations) const;

private:
  SystemProblem() = default;

  Space space_ = Space::hilbert(1);
  std::vector<Operator> equations_;
  std::optional<Vector> known_solution_;
  OracleDescriptor oracle_;
};

/// One row per iterate x_n. Step quantities (subs, inner stats) describe the
/// step taken from x_n and are empty on the final row.
struct TraceRow {
  long n = 0;
  Vector x;
  std::vector<Vector> subs;
  double alpha = 0.0;
  double gamma = 0.0;  // NaN for Newton runs
  std::vector<double> residuals;
  std::optional<double> error;
  std::vector<int> inner_iterations;
  std::vector<double> inner_residuals;
  std::optional<double> omega;
  std::optional<double> envelope_bound;
  std::optional<double> collapse_deviation;
};

struct RunFailure {
  long step = 0;
  std::optional<std::size_t> equation;
  std::string message;
};

struct RunTrace {
  std::string method;
  std::vector<TraceRow> rows;
  std::optional<RunFailure> failure;
  std::optional<long> n_star;

  bool ok() const { return !failure.has_value(); }
  /// Errors of all rows; throws ContractViolation when any is missing.
  std::vector<double> errors() const;
  std::vector<double> alphas() const;
  const Vector& final_iterate() const;
};

struct RunOptions {
  int threads = 1;
  bool record_subiterates = false;
  /// Explicit runs only: evaluate the collapsed one-line form at every step.
  bool check_collapse = true;
  /// Shared pool; when null a pool with `threads` workers is created per run.
  WorkerPool* pool = nullptr;
};

struct StepResult {
  Vector next;
  std::vector<Vector> subs;
  std::vector<int> inner_iterations;
  std::vector<double> inner_residuals;
};

/// Inner tolerance used for an implicit step at regularization level alpha.
double implicit_inner_tolerance(const InnerConfig& inner, double alpha);

/// x_n^i solves A_i(x) + (alpha/N + gamma) x = gamma x_n; x_{n+1} is their mean.
/// Inner failures raise StepError carrying the equation index.
StepResult implicit_step(const SystemProblem& problem, const Vector& x, double alpha,
                         double gamma, const InnerConfig& inner, WorkerPool* pool = nullptr);

RunTrace run_implicit(const SystemProblem& problem, const Schedule& alpha, const Schedule& gamma,
                      const Vector& x0, long n_iters, const InnerConfig& inner,
                      const RunOptions& options = {});

/// Noise levels h_n, delta_n for the perturbed operators of each step.
struct NoiseLevels {
  Schedule h = Schedule::constant(ScheduleRole::Noise, 0.0);
  Schedule delta = Schedule::constant(ScheduleRole::Noise, 0.0);
  double growth_constant = 1.0;
  double growth_slope = 1.0;
  std::uint64_t seed = 0;
  /// Draw a fresh perturbation at every level instead of rescaling one.
  bool redraw_per_level = false;

  NoiseSpec at(long n, std::size_t equation) const;
};

/// Implicit scheme where step n uses perturb(A_i, levels.at(n, i)).
RunTrace run_implicit_noisy(const SystemProblem& problem, const NoiseLevels& levels,
                            const Schedule& alpha, const Schedule& gamma, const Vector& z0,
                            long n_iters, const InnerConfig& inner,
                            const RunOptions& options = {});

/// z_ni = z_n - tau (A_i(z_n) + (alpha/N) z_n) with tau = 1/gamma; z_{n+1} is their mean.
StepResult explicit_step(const SystemProblem& problem, const Vector& z, double alpha,
                         double gamma, WorkerPool* pool = nullptr);

/// ||explicit_step(...) - (z_n - (sum_i A_i(z_n) + alpha z_n) / (N gamma))||.
double explicit_collapse_check(const SystemProblem& problem, const Vector& z, double alpha,
                               double gamma);

RunTrace run_explicit(const SystemProblem& problem, const Schedule& alpha, const Schedule& gamma,
                      const Vector& z0, long n_iters, const RunOptions& options = {});

struct SumEquivalenceReport {
  enum class Verdict { Pass, Fail, NotApplicable };
  double sum_residual = 0.0;
  double max_individual = 0.0;
  /// phi_R^-1(tol ||y - xhat||), the bound on each ||A_i(y)||.
  std::optional<double> individual_bound;
  double radius = 0.0;
  Verdict verdict = Verdict::NotApplicable;
  std::string note;
};

/// Checks that a solution of the sum equation solves every equation.
SumEquivalenceReport check_sum_equivalence(const SystemProblem& problem, const Vector& y,
                                           double tol);

} // namespace pirm
