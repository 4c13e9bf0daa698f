#include "newton.hpp"

#include "errors.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace pirm {

SourceAnchors make_source_anchors(const SystemProblem& problem, const Vector& xhat,
                                  const std::vector<Vector>& v) {
  if (v.size() != problem.size()) {
    throw ContractViolation("need one source element per equation");
  }
  problem.space().require_dim(xhat);
  SourceAnchors out;
  out.anchors.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    problem.space().require_dim(v[i]);
    out.anchors.push_back(xhat + problem.equations()[i].derivative_apply(xhat, v[i]));
    out.sum_v_norm += problem.space().norm(v[i]);
  }
  return out;
}

NewtonGate newton_gate(std::size_t n_equations, double rho, double k, double sum_v_norm,
                       std::optional<double> omega0) {
  if (n_equations == 0) throw ContractViolation("need at least one equation");
  if (!(rho >= 1.0) || !(k >= 0.0) || !(sum_v_norm >= 0.0)) {
    throw ContractViolation("gate needs rho >= 1, K >= 0 and sum ||v_i|| >= 0");
  }
  const double n = static_cast<double>(n_equations);
  NewtonGate g;
  g.a = 2.0 * rho * sum_v_norm / n;
  g.b = 2.0 * rho * k * sum_v_norm / n;
  g.c = k * rho / 2.0;
  g.lhs = g.b + 2.0 * std::sqrt(g.a * g.c);
  g.passed = g.lhs < 1.0;
  if (g.passed) {
    const double one_b = 1.0 - g.b;
    if (g.c == 0.0) {
      g.m_plus = std::numeric_limits<double>::infinity();
      g.m_minus = g.a / one_b;
    } else {
      const double root = std::sqrt(one_b * one_b - 4.0 * g.a * g.c);
      g.m_plus = (one_b + root) / (2.0 * g.c);
      g.m_minus = (one_b - root) / (2.0 * g.c);
    }
  }
  g.omega0 = omega0;
  if (omega0) g.omega0_status = (g.passed && *omega0 <= *g.m_plus) ? "holds" : "violated";
  return g;
}

StepResult newton_step(const SystemProblem& problem, const Vector& x, double alpha,
                       const std::vector<Vector>& anchors, const InnerConfig& inner,
                       WorkerPool* pool) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ContractViolation("alpha must be > 0");
  if (anchors.size() != problem.size()) throw ContractViolation("need one anchor per equation");
  const Space& space = problem.space();
  space.require_dim(x);
  for (const auto& a : anchors) space.require_dim(a);
  const std::size_t n_eq = problem.size();
  const double shift = alpha / static_cast<double>(n_eq);

  StepResult out;
  out.subs.resize(n_eq);
  out.inner_iterations.assign(n_eq, 1);
  out.inner_residuals.assign(n_eq, 0.0);
  auto body = [&](std::size_t i) {
    const Operator& op = problem.equations()[i];
    try {
      const Vector rhs = -op.apply(x) - shift * (x - anchors[i]);
      const LinearAction jac{problem.dim(),
                             [&](const Vector& v) { return op.derivative_apply(x, v); }};
      ShiftedSolveResult r = solve_shifted_linear(jac, shift, rhs, inner, space);
      out.subs[i] = x + r.s;
      out.inner_residuals[i] = r.residual;
    } catch (const std::exception& e) {
      throw StepError("equation " + std::to_string(i) + ": " + e.what(), i);
    }
  };
  if (pool) {
    pool->parallel_for(n_eq, body);
  } else {
    for (std::size_t i = 0; i < n_eq; ++i) body(i);
  }
  Vector s = out.subs.front();
  for (std::size_t i = 1; i < n_eq; ++i) s += out.subs[i];
  out.next = s / static_cast<double>(n_eq);
  return out;
}

namespace {

double certified_rho(const NewtonConfig& cfg, long n_iters) {
  if (cfg.rho_cert) return *cfg.rho_cert;
  long horizon = std::max(2L, n_iters + 1);
  if (auto last = cfg.alpha.last_index()) horizon = std::min(horizon, *last);
  const ScheduleReport r = validate_newton(cfg.alpha, std::max(2L, horizon));
  return r.certified_rho ? *r.certified_rho : std::numeric_limits<double>::infinity();
}

std::optional<double> estimate_lipschitz(const SystemProblem& problem, const NewtonConfig& cfg) {
  if (cfg.lipschitz) return cfg.lipschitz;
  double k = 0.0;
  try {
    for (const auto& op : problem.equations()) k = std::max(k, lipschitz_derivative_constant(op));
  } catch (const CapabilityError&) {
    return std::nullopt;
  }
  return k;
}

NewtonRun newton_driver(const SystemProblem& problem, const SystemProblem& reference,
                        const NewtonConfig& cfg, const Vector& x0, long n_iters,
                        const RunOptions& options, const char* method) {
  if (n_iters < 0) throw ContractViolation("n_iters must be >= 0");
  if (!(cfg.eta > 0.0)) throw ContractViolation("eta must be > 0");
  problem.space().require_dim(x0);
  const Space& space = problem.space();
  const double n_eq = static_cast<double>(problem.size());

  NewtonRun run;
  run.rho = certified_rho(cfg, n_iters);
  run.lipschitz = estimate_lipschitz(reference, cfg);
  const auto& xhat = reference.known_solution();
  std::optional<double> omega0;
  if (xhat) omega0 = n_eq * space.norm(x0 - *xhat) / cfg.alpha.value(0);
  if (run.lipschitz && std::isfinite(run.rho)) {
    run.gate = newton_gate(problem.size(), run.rho, *run.lipschitz, cfg.sum_v_norm, omega0);
  } else {
    run.gate.passed = false;
    run.gate.omega0 = omega0;
  }

  std::unique_ptr<WorkerPool> owned;
  WorkerPool* pool = options.pool;
  if (!pool) {
    owned = std::make_unique<WorkerPool>(options.threads);
    pool = owned.get();
  }

  RunTrace& trace = run.trace;
  trace.method = method;
  trace.rows.reserve(static_cast<std::size_t>(n_iters) + 1);
  Vector x = x0;
  std::optional<double> prev_omega;
  double prev_tol_slack = 0.0;
  for (long n = 0; n <= n_iters; ++n) {
    TraceRow row;
    row.n = n;
    row.x = x;
    row.gamma = std::numeric_limits<double>::quiet_NaN();
    auto last = cfg.alpha.last_index();
    row.alpha = (last && n > *last) ? std::numeric_limits<double>::quiet_NaN() : cfg.alpha.value(n);
    for (const auto& op : reference.equations()) row.residuals.push_back(space.norm(op.apply(x)));
    if (xhat) {
      row.error = space.norm(x - *xhat);
      row.omega = n_eq * *row.error / row.alpha;
      if (prev_omega && run.lipschitz && std::isfinite(run.rho)) {
        const double w = *prev_omega;
        row.envelope_bound = run.gate.a + run.gate.b * w + run.gate.c * w * w +
                             10.0 * prev_tol_slack / row.alpha;
      }
      prev_omega = row.omega;
    }
    if (n == n_iters) {
      trace.rows.push_back(std::move(row));
      break;
    }
    try {
      StepResult step = newton_step(problem, x, cfg.alpha.value(n), cfg.anchors, cfg.inner, pool);
      if (options.record_subiterates) row.subs = std::move(step.subs);
      row.inner_iterations = std::move(step.inner_iterations);
      row.inner_residuals = std::move(step.inner_residuals);
      prev_tol_slack = cfg.inner.tol;
      x = std::move(step.next);
    } catch (const std::exception& e) {
      RunFailure f;
      f.step = n;
      f.message = e.what();
      if (auto* se = dynamic_cast<const StepError*>(&e)) f.equation = se->equation();
      trace.failure = std::move(f);
      trace.rows.push_back(std::move(row));
      return run;
    }
    trace.rows.push_back(std::move(row));
  }
  return run;
}

} // namespace

NewtonRun run_newton(const SystemProblem& problem, const NewtonConfig& cfg, const Vector& x0,
                     long n_iters, const RunOptions& options) {
  return newton_driver(problem, problem, cfg, x0, n_iters, options, "newton");
}

namespace {
constexpr double kStoppingSlack = 1e-12;
} // namespace

StoppingIndex stopping_index(double delta, double h, double eta, const Schedule& alpha,
                             long n_cap) {
  if (!(delta >= 0.0) || !(h >= 0.0)) throw ContractViolation("noise levels must be >= 0");
  if (!(eta > 0.0)) throw ContractViolation("eta must be > 0");
  if (n_cap < 0) throw ContractViolation("n_cap must be >= 0");
  const double t = (delta + h) / eta;
  // Exact boundary cases such as alpha_n^2 = 1/(n+1) = t must not be lost to
  // rounding in pow, hence the relative slack.
  auto admissible = [&](long n) {
    const double a = alpha.value(n);
    return a * a >= t * (1.0 - kStoppingSlack);
  };
  if (t == 0.0) return {n_cap, true};
  if (!admissible(0)) {
    throw NoAdmissibleIndex("noise exceeds regularization range: alpha_0^2 < (delta + h) / eta");
  }
  if (!alpha.is_power_law()) {
    const long end = std::min(n_cap, *alpha.last_index());
    long best = 0;
    for (long n = 1; n <= end; ++n) {
      if (admissible(n)) best = n;
    }
    return {best, best == n_cap};
  }
  const double k = alpha.exponent();
  if (k == 0.0) return {n_cap, true};
  // c0^2 (n+1)^(-2k) >= t  <=>  n <= (c0^2 / t)^(1/(2k)) - 1
  const double c0 = alpha.coefficient();
  const double bound = std::pow(c0 * c0 / t, 1.0 / (2.0 * k)) - 1.0;
  long n = (bound >= static_cast<double>(n_cap)) ? n_cap : std::max(0L, static_cast<long>(std::floor(bound)));
  while (n < n_cap && admissible(n + 1)) ++n;
  while (n > 0 && !admissible(n)) --n;
  return {n, n == n_cap && admissible(n_cap + 1)};
}

NewtonRun run_newton_noisy(const SystemProblem& problem, const NoiseSpec& noise,
                           const NewtonConfig& cfg, const Vector& x0, long n_cap,
                           const RunOptions& options) {
  const StoppingIndex stop = stopping_index(noise.delta, noise.h, cfg.eta, cfg.alpha, n_cap);
  const long n_star = stop.index + 1;
  std::vector<Operator> ops;
  ops.reserve(problem.size());
  for (std::size_t i = 0; i < problem.size(); ++i) {
    NoiseSpec s = noise;
    s.seed = derive_seed(noise.seed, i);
    ops.push_back(perturb(problem.equations()[i], s, problem.space()));
  }
  const SystemProblem noisy = problem.with_equations(std::move(ops));
  NewtonRun run = newton_driver(noisy, problem, cfg, x0, n_star, options, "newton-noisy");
  run.trace.n_star = n_star;
  return run;
}

} // namespace pirm
