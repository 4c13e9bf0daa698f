#include "inner.hpp"

#include "errors.hpp"

#include <cmath>
#include <string>

namespace pirm {

namespace {

constexpr int kMaxHalvings = 30;
constexpr int kMaxRefinements = 3;

void check_common(double c, const Vector& b, const InnerConfig& cfg, const Space& space) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ContractViolation("regularization shift must be > 0");
  if (!(cfg.tol > 0.0)) throw ContractViolation("inner tolerance must be > 0");
  if (cfg.max_iter < 1) throw ContractViolation("inner max_iter must be >= 1");
  space.require_dim(b);
}

double regularized_residual(const Operator& op, double c, const Vector& b, const Vector& x,
                            const Space& space) {
  return space.norm(op.apply(x) + c * x - b);
}

// Factorizes once and polishes with a few rounds of iterative refinement.
template <class Residual>
Vector solve_dense(const Matrix& system, const Vector& rhs, Residual&& residual_norm, double tol,
                   double* final_residual, int* refinements) {
  const bool symmetric =
      (system - system.transpose()).cwiseAbs().maxCoeff() <=
      1e-14 * std::max(1.0, system.cwiseAbs().maxCoeff());
  Vector x;
  Eigen::PartialPivLU<Matrix> lu;
  Eigen::LDLT<Matrix> ldlt;
  if (symmetric) {
    ldlt.compute(system);
    x = ldlt.solve(rhs);
  } else {
    lu.compute(system);
    x = lu.solve(rhs);
  }
  double res = residual_norm(x);
  int k = 0;
  while (res > tol && k < kMaxRefinements) {
    const Vector r = rhs - system * x;
    x += symmetric ? Vector(ldlt.solve(r)) : Vector(lu.solve(r));
    res = residual_norm(x);
    ++k;
  }
  *final_residual = res;
  *refinements = k;
  return x;
}

InnerResult solve_direct(const Operator& op, double c, const Vector& b, const InnerConfig& cfg,
                         const Space& space) {
  auto form = op.affine_form();
  if (!form) throw ContractViolation("DirectLinear requires an affine-linear operator");
  const int d = op.dim();
  const Matrix system = form->matrix + c * Matrix::Identity(d, d);
  const Vector rhs = b + form->data;
  InnerResult out;
  out.method = InnerMethod::DirectLinear;
  int refinements = 0;
  out.x = solve_dense(
      system, rhs, [&](const Vector& x) { return regularized_residual(op, c, b, x, space); },
      cfg.tol, &out.residual, &refinements);
  out.iterations = 1 + refinements;
  if (!(out.residual <= cfg.tol)) {
    throw InnerSolveError("direct solve residual " + std::to_string(out.residual) +
                              " above tolerance",
                          out.residual, out.iterations);
  }
  return out;
}

InnerResult solve_contraction(const Operator& op, double c, const Vector& b,
                              const InnerConfig& cfg, const Space& space,
                              const std::optional<Vector>& guess) {
  auto form = op.nonexpansive_form();
  if (!form) throw ContractViolation("contraction iteration requires an I - T operator");
  const Vector rhs = b + form->shift;
  Vector x = guess ? *guess : Vector(rhs / (1.0 + c));
  InnerResult out;
  out.method = InnerMethod::ContractionFixedPoint;
  for (int k = 0; k <= cfg.max_iter; ++k) {
    const Vector tx = form->map.apply(x);
    // A(x) + c x - b = (1 + c) x - T(x) - (b + shift)
    out.residual = space.norm((1.0 + c) * x - tx - rhs);
    if (out.residual <= cfg.tol) {
      out.x = std::move(x);
      out.iterations = k;
      return out;
    }
    if (k == cfg.max_iter) break;
    x = (rhs + tx) / (1.0 + c);
  }
  throw InnerSolveError("contraction iteration did not reach tolerance", out.residual,
                        cfg.max_iter);
}

InnerResult solve_newton(const Operator& op, double c, const Vector& b, const InnerConfig& cfg,
                         const Space& space, const std::optional<Vector>& guess) {
  const int d = op.dim();
  Vector x = guess ? *guess : Vector(b / (1.0 + c));
  Vector r = op.apply(x) + c * x - b;
  double res = space.norm(r);
  InnerResult out;
  out.method = InnerMethod::DampedNewton;
  for (int k = 0; k <= cfg.max_iter; ++k) {
    if (res <= cfg.tol) {
      out.x = std::move(x);
      out.residual = res;
      out.iterations = k;
      return out;
    }
    if (k == cfg.max_iter) break;
    const LinearAction jac{d, [&](const Vector& v) { return op.derivative_apply(x, v); }};
    Matrix system = assemble(jac);
    system.diagonal().array() += c;
    const Vector step = system.partialPivLu().solve(-r);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      Vector trial = x + t * step;
      Vector r_trial = op.apply(trial) + c * trial - b;
      const double res_trial = space.norm(r_trial);
      if (res_trial < res) {
        x = std::move(trial);
        r = std::move(r_trial);
        res = res_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw InnerSolveError("damped Newton could not decrease the residual", res, k);
    }
  }
  throw InnerSolveError("damped Newton did not reach tolerance", res, cfg.max_iter);
}

} // namespace

Matrix assemble(const LinearAction& l) {
  if (l.dim < 1 || !l.apply) throw ContractViolation("linear action needs dim >= 1");
  Matrix m(l.dim, l.dim);
  Vector e = Vector::Zero(l.dim);
  for (int j = 0; j < l.dim; ++j) {
    e[j] = 1.0;
    m.col(j) = l.apply(e);
    e[j] = 0.0;
  }
  return m;
}

InnerMethod select_method(const Operator& op) {
  if (op.affine_form()) return InnerMethod::DirectLinear;
  if (op.nonexpansive_form()) return InnerMethod::ContractionFixedPoint;
  return InnerMethod::DampedNewton;
}

InnerResult solve_regularized(const Operator& op, double c, const Vector& b,
                              const InnerConfig& cfg, const Space& space,
                              const std::optional<Vector>& initial_guess) {
  check_common(c, b, cfg, space);
  if (op.dim() != space.dim()) throw ContractViolation("operator dimension differs from space");
  const InnerMethod method = cfg.method ? *cfg.method : select_method(op);
  switch (method) {
  case InnerMethod::DirectLinear:
    return solve_direct(op, c, b, cfg, space);
  case InnerMethod::ContractionFixedPoint:
    return solve_contraction(op, c, b, cfg, space, initial_guess);
  case InnerMethod::DampedNewton:
    return solve_newton(op, c, b, cfg, space, initial_guess);
  }
  throw ContractViolation("unknown inner method");
}

ShiftedSolveResult solve_shifted_linear(const LinearAction& l, double alpha, const Vector& r,
                                        const InnerConfig& cfg, const Space& space) {
  check_common(alpha, r, cfg, space);
  if (l.dim != space.dim()) throw ContractViolation("linear action dimension differs from space");
  Matrix system = assemble(l);
  system.diagonal().array() += alpha;
  ShiftedSolveResult out;
  int refinements = 0;
  out.s = solve_dense(
      system, r, [&](const Vector& s) { return space.norm(system * s - r); }, cfg.tol,
      &out.residual, &refinements);
  if (!(out.residual <= cfg.tol)) {
    throw InnerSolveError("shifted linear solve residual above tolerance", out.residual,
                          1 + refinements);
  }
  const double bound = (space.norm(r) + cfg.tol) / alpha;
  out.resolvent_bound_ok = space.norm(out.s) <= bound * (1.0 + 1e-9);
  if (!out.resolvent_bound_ok) {
    throw ContractViolation("resolvent bound ||s|| <= ||r||/alpha violated; derivative is not "
                            "accretive");
  }
  return out;
}

} // namespace pirm
