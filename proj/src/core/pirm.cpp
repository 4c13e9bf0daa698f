#include "pirm.hpp"

#include "errors.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace pirm {

// ---------------------------------------------------------------------------
// SystemProblem

SystemProblem::SystemProblem(Space space, std::vector<Operator> equations,
                             std::optional<Vector> known_solution, OracleDescriptor oracle)
    : space_(space), equations_(std::move(equations)), oracle_(std::move(oracle)) {
  if (equations_.empty()) throw ContractViolation("a system needs at least one equation");
  for (std::size_t i = 0; i < equations_.size(); ++i) {
    if (equations_[i].dim() != space_.dim()) {
      throw ContractViolation("equation " + std::to_string(i) + " has dimension " +
                              std::to_string(equations_[i].dim()) + ", space has " +
                              std::to_string(space_.dim()));
    }
  }
  if (oracle_.kind == OracleDescriptor::Kind::DeclaredAffineSet) {
    space_.require_dim(oracle_.point);
    if (oracle_.basis.size() > 0 && oracle_.basis.rows() != space_.dim()) {
      throw ContractViolation("declared solution-set basis has the wrong row count");
    }
  }
  if (known_solution) *this = with_known_solution(std::move(*known_solution));
}

SystemProblem SystemProblem::with_known_solution(Vector xhat) const {
  space_.require_dim(xhat);
  const double scale = std::max(1.0, space_.norm(xhat));
  const double res = max_residual(xhat);
  if (!(res <= 1e-8 * scale)) {
    throw ContractViolation("known solution is inconsistent: max_i ||A_i(x)|| = " +
                            std::to_string(res));
  }
  SystemProblem out = *this;
  out.known_solution_ = std::move(xhat);
  return out;
}

SystemProblem SystemProblem::with_equations(std::vector<Operator> equations) const {
  if (equations.size() != equations_.size()) {
    throw ContractViolation("replacement system must keep the number of equations");
  }
  SystemProblem out;
  out.space_ = space_;
  out.known_solution_ = known_solution_;
  out.oracle_ = oracle_;
  for (const auto& e : equations) {
    if (e.dim() != space_.dim()) throw ContractViolation("replacement equation dimension");
  }
  out.equations_ = std::move(equations);
  return out;
}

Operator SystemProblem::sum_operator() const {
  if (equations_.size() == 1) return equations_.front();
  return Operator::sum(equations_);
}

double SystemProblem::max_residual(const Vector& x) const {
  double m = 0.0;
  for (const auto& a : equations_) m = std::max(m, space_.norm(a.apply(x)));
  return m;
}

// ---------------------------------------------------------------------------
// RunTrace

std::vector<double> RunTrace::errors() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (!r.error) throw ContractViolation("trace has no reference errors");
    out.push_back(*r.error);
  }
  return out;
}

std::vector<double> RunTrace::alphas() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.alpha);
  return out;
}

const Vector& RunTrace::final_iterate() const {
  if (rows.empty()) throw ContractViolation("empty trace");
  return rows.back().x;
}

// ---------------------------------------------------------------------------
// Shared driver pieces

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double value_or_nan(const Schedule& s, long n) {
  if (auto last = s.last_index(); last && n > *last) return kNaN;
  return s.value(n);
}

Vector ordered_mean(const std::vector<Vector>& v) {
  Vector s = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(v.size());
}

// Pool owned by the run when the caller did not pass one.
class PoolHandle {
public:
  explicit PoolHandle(const RunOptions& o) {
    if (o.pool) {
      pool_ = o.pool;
    } else {
      owned_ = std::make_unique<WorkerPool>(o.threads);
      pool_ = owned_.get();
    }
  }
  WorkerPool* get() const { return pool_; }

private:
  std::unique_ptr<WorkerPool> owned_;
  WorkerPool* pool_ = nullptr;
};

void run_for_each(WorkerPool* pool, std::size_t count,
                  const std::function<void(std::size_t)>& body) {
  if (pool) {
    pool->parallel_for(count, body);
  } else {
    for (std::size_t i = 0; i < count; ++i) body(i);
  }
}

TraceRow begin_row(const SystemProblem& problem, long n, const Vector& x, double alpha,
                   double gamma) {
  TraceRow row;
  row.n = n;
  row.x = x;
  row.alpha = alpha;
  row.gamma = gamma;
  row.residuals.reserve(problem.size());
  for (const auto& a : problem.equations()) row.residuals.push_back(problem.space().norm(a.apply(x)));
  if (problem.known_solution()) row.error = problem.space().norm(x - *problem.known_solution());
  return row;
}

void record_failure(RunTrace& trace, long n, const std::exception& e) {
  RunFailure f;
  f.step = n;
  f.message = e.what();
  if (auto* se = dynamic_cast<const StepError*>(&e)) f.equation = se->equation();
  trace.failure = std::move(f);
}

struct ExplicitEval {
  StepResult step;
  std::vector<Vector> values;  // A_i(z)
};

ExplicitEval explicit_eval(const SystemProblem& problem, const Vector& z, double alpha,
                           double gamma, WorkerPool* pool) {
  if (!(alpha >= 0.0) || !(gamma > 0.0)) {
    throw ContractViolation("explicit step needs alpha >= 0 and gamma > 0");
  }
  problem.space().require_dim(z);
  const std::size_t n_eq = problem.size();
  const double tau = 1.0 / gamma;
  const double a_over_n = alpha / static_cast<double>(n_eq);
  ExplicitEval out;
  out.values.resize(n_eq);
  out.step.subs.resize(n_eq);
  run_for_each(pool, n_eq, [&](std::size_t i) {
    try {
      out.values[i] = problem.equations()[i].apply(z);
    } catch (const std::exception& e) {
      throw StepError(std::string("operator evaluation failed: ") + e.what(), i);
    }
    out.step.subs[i] = z - tau * (out.values[i] + a_over_n * z);
  });
  out.step.next = ordered_mean(out.step.subs);
  return out;
}

double collapse_deviation(const SystemProblem& problem, const Vector& z, double alpha,
                          double gamma, const ExplicitEval& ev) {
  Vector sum = ev.values.front();
  for (std::size_t i = 1; i < ev.values.size(); ++i) sum += ev.values[i];
  const double n_eq = static_cast<double>(problem.size());
  const Vector collapsed = z - (sum + alpha * z) / (n_eq * gamma);
  return problem.space().norm(ev.step.next - collapsed);
}

} // namespace

// ---------------------------------------------------------------------------
// Implicit scheme

double implicit_inner_tolerance(const InnerConfig& inner, double alpha) {
  return std::min(inner.tol, 1e-3 * alpha * alpha);
}

StepResult implicit_step(const SystemProblem& problem, const Vector& x, double alpha,
                         double gamma, const InnerConfig& inner, WorkerPool* pool) {
  if (!(alpha > 0.0) || !(gamma > 0.0) || !std::isfinite(alpha) || !std::isfinite(gamma)) {
    throw ContractViolation("implicit step needs alpha > 0 and gamma > 0");
  }
  problem.space().require_dim(x);
  const std::size_t n_eq = problem.size();
  const double c = alpha / static_cast<double>(n_eq) + gamma;
  const Vector b = gamma * x;
  InnerConfig cfg = inner;
  cfg.tol = implicit_inner_tolerance(inner, alpha);

  StepResult out;
  out.subs.resize(n_eq);
  out.inner_iterations.assign(n_eq, 0);
  out.inner_residuals.assign(n_eq, 0.0);
  run_for_each(pool, n_eq, [&](std::size_t i) {
    try {
      InnerResult r = solve_regularized(problem.equations()[i], c, b, cfg, problem.space(), x);
      out.subs[i] = std::move(r.x);
      out.inner_iterations[i] = r.iterations;
      out.inner_residuals[i] = r.residual;
    } catch (const ContractViolation&) {
      throw;
    } catch (const std::exception& e) {
      throw StepError("equation " + std::to_string(i) + ": " + e.what(), i);
    }
  });
  out.next = ordered_mean(out.subs);
  return out;
}

namespace {

RunTrace implicit_driver(const SystemProblem& problem, const NoiseLevels* levels,
                         const Schedule& alpha, const Schedule& gamma, const Vector& x0,
                         long n_iters, const InnerConfig& inner, const RunOptions& options) {
  if (n_iters < 1) throw ContractViolation("n_iters must be >= 1");
  problem.space().require_dim(x0);
  PoolHandle pool(options);
  RunTrace trace;
  trace.method = levels ? "implicit-noisy" : "implicit";
  trace.rows.reserve(static_cast<std::size_t>(n_iters) + 1);

  // Perturbed systems are rebuilt only when the levels change.
  std::optional<SystemProblem> noisy;
  std::vector<NoiseSpec> last_specs;

  Vector x = x0;
  for (long n = 0; n <= n_iters; ++n) {
    const double a = value_or_nan(alpha, n);
    const double g = value_or_nan(gamma, n);
    TraceRow row = begin_row(problem, n, x, a, g);
    if (n == n_iters) {
      trace.rows.push_back(std::move(row));
      break;
    }
    try {
      const SystemProblem* current = &problem;
      if (levels) {
        std::vector<NoiseSpec> specs;
        for (std::size_t i = 0; i < problem.size(); ++i) specs.push_back(levels->at(n, i));
        bool same = !last_specs.empty();
        for (std::size_t i = 0; same && i < specs.size(); ++i) {
          same = specs[i].h == last_specs[i].h && specs[i].delta == last_specs[i].delta &&
                 specs[i].seed == last_specs[i].seed;
        }
        if (!same) {
          std::vector<Operator> ops;
          for (std::size_t i = 0; i < problem.size(); ++i) {
            ops.push_back(perturb(problem.equations()[i], specs[i], problem.space()));
          }
          noisy = problem.with_equations(std::move(ops));
          last_specs = std::move(specs);
        }
        current = &*noisy;
      }
      StepResult step = implicit_step(*current, x, alpha.value(n), gamma.value(n), inner,
                                      pool.get());
      if (options.record_subiterates) row.subs = std::move(step.subs);
      row.inner_iterations = std::move(step.inner_iterations);
      row.inner_residuals = std::move(step.inner_residuals);
      x = std::move(step.next);
    } catch (const std::exception& e) {
      record_failure(trace, n, e);
      trace.rows.push_back(std::move(row));
      return trace;
    }
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

} // namespace

RunTrace run_implicit(const SystemProblem& problem, const Schedule& alpha, const Schedule& gamma,
                      const Vector& x0, long n_iters, const InnerConfig& inner,
                      const RunOptions& options) {
  return implicit_driver(problem, nullptr, alpha, gamma, x0, n_iters, inner, options);
}

NoiseSpec NoiseLevels::at(long n, std::size_t equation) const {
  NoiseSpec s;
  s.h = h.value(n);
  s.delta = delta.value(n);
  s.growth_constant = growth_constant;
  s.growth_slope = growth_slope;
  s.seed = redraw_per_level
               ? derive_seed(seed, equation, static_cast<std::uint64_t>(n) + 1)
               : derive_seed(seed, equation);
  return s;
}

RunTrace run_implicit_noisy(const SystemProblem& problem, const NoiseLevels& levels,
                            const Schedule& alpha, const Schedule& gamma, const Vector& z0,
                            long n_iters, const InnerConfig& inner, const RunOptions& options) {
  for (const auto& s : {&levels.h, &levels.delta}) {
    if (auto last = s->last_index(); last && *last < n_iters - 1) {
      throw ContractViolation("noise levels must be defined for every step");
    }
  }
  return implicit_driver(problem, &levels, alpha, gamma, z0, n_iters, inner, options);
}

// ---------------------------------------------------------------------------
// Explicit scheme

StepResult explicit_step(const SystemProblem& problem, const Vector& z, double alpha,
                         double gamma, WorkerPool* pool) {
  return explicit_eval(problem, z, alpha, gamma, pool).step;
}

double explicit_collapse_check(const SystemProblem& problem, const Vector& z, double alpha,
                               double gamma) {
  const ExplicitEval ev = explicit_eval(problem, z, alpha, gamma, nullptr);
  return collapse_deviation(problem, z, alpha, gamma, ev);
}

RunTrace run_explicit(const SystemProblem& problem, const Schedule& alpha, const Schedule& gamma,
                      const Vector& z0, long n_iters, const RunOptions& options) {
  if (n_iters < 0) throw ContractViolation("n_iters must be >= 0");
  problem.space().require_dim(z0);
  PoolHandle pool(options);
  RunTrace trace;
  trace.method = "explicit";
  trace.rows.reserve(static_cast<std::size_t>(n_iters) + 1);
  Vector z = z0;
  for (long n = 0; n <= n_iters; ++n) {
    const double a = value_or_nan(alpha, n);
    const double g = value_or_nan(gamma, n);
    TraceRow row = begin_row(problem, n, z, a, g);
    if (n == n_iters) {
      trace.rows.push_back(std::move(row));
      break;
    }
    try {
      ExplicitEval ev = explicit_eval(problem, z, alpha.value(n), gamma.value(n), pool.get());
      if (options.check_collapse) {
        row.collapse_deviation = collapse_deviation(problem, z, alpha.value(n), gamma.value(n), ev);
      }
      if (options.record_subiterates) row.subs = std::move(ev.step.subs);
      z = std::move(ev.step.next);
      if (!z.allFinite()) throw StepError("iterate became non-finite", 0);
    } catch (const std::exception& e) {
      record_failure(trace, n, e);
      trace.rows.push_back(std::move(row));
      return trace;
    }
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Sum equation

SumEquivalenceReport check_sum_equivalence(const SystemProblem& problem, const Vector& y,
                                           double tol) {
  if (!(tol > 0.0)) throw ContractViolation("tolerance must be > 0");
  const Space& space = problem.space();
  space.require_dim(y);
  SumEquivalenceReport r;
  Vector sum = Vector::Zero(problem.dim());
  for (const auto& a : problem.equations()) {
    const Vector v = a.apply(y);
    r.max_individual = std::max(r.max_individual, space.norm(v));
    sum += v;
  }
  r.sum_residual = space.norm(sum);
  if (r.sum_residual > tol) {
    r.verdict = SumEquivalenceReport::Verdict::NotApplicable;
    r.note = "sum residual above tolerance; no claim";
    return r;
  }
  if (!problem.known_solution()) {
    r.note = "no reference solution; individual bound unavailable";
    return r;
  }
  for (const auto& a : problem.equations()) {
    if (!a.nonexpansive_form()) {
      r.note = "bound needs inverse uniformly accretive (I - T) equations";
      return r;
    }
  }
  const Vector& xhat = *problem.known_solution();
  r.radius = std::max(space.norm(y), space.norm(xhat));
  // Every pairing <A_i y - A_i xhat, J(y - xhat)> is >= phi(R, ||A_i y||) and
  // they add up to <sum_i A_i y, J(y - xhat)>.
  const double budget = std::max(tol, space.dual_norm(sum)) * space.norm(y - xhat);
  r.individual_bound = space.phi_inverse_function(std::max(r.radius, 1e-300), budget);
  r.verdict = r.max_individual <= *r.individual_bound * (1.0 + 1e-9) + 1e-15
                  ? SumEquivalenceReport::Verdict::Pass
                  : SumEquivalenceReport::Verdict::Fail;
  return r;
}

} // namespace pirm
