#include "diagnostics.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pirm {

namespace {

bool all_affine(const SystemProblem& problem) {
  return std::all_of(problem.equations().begin(), problem.equations().end(),
                     [](const Operator& op) { return op.affine_form().has_value(); });
}

double relative_gap(const Space& space, const Vector& a, const Vector& b) {
  return space.norm(a - b) / std::max(1.0, space.norm(a));
}

void require_agreement(const Space& space, const Vector& xhat, const Vector& check,
                       const char* route, OracleResult& out) {
  out.cross_check = relative_gap(space, xhat, check);
  out.independent_check = true;
  if (!(*out.cross_check <= kOracleAgreement)) {
    throw NoOracle(std::string(route) + " and tiny-alpha routes disagree (relative gap " +
                   std::to_string(*out.cross_check) + ")");
  }
}

Vector stacked_min_norm(const SystemProblem& problem) {
  const int d = problem.dim();
  const auto n = static_cast<int>(problem.size());
  Matrix stacked(n * d, d);
  Vector rhs(n * d);
  for (int i = 0; i < n; ++i) {
    const AffineForm form = *problem.equations()[static_cast<std::size_t>(i)].affine_form();
    stacked.middleRows(i * d, d) = form.matrix;
    rhs.segment(i * d, d) = form.data;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(stacked);
  cod.setThreshold(1e-10);
  return cod.solve(rhs);
}

} // namespace

Vector tiny_alpha_solution(const SystemProblem& problem, double alpha, const InnerConfig& inner) {
  if (!(alpha > 0.0)) throw ContractViolation("alpha must be > 0");
  const Operator sum = problem.sum_operator();
  InnerConfig cfg = inner;
  if (!cfg.method) {
    cfg.method = sum.affine_form() ? InnerMethod::DirectLinear : InnerMethod::DampedNewton;
  }
  return solve_regularized(sum, alpha, Vector::Zero(problem.dim()), cfg, problem.space()).x;
}

OracleResult min_norm_oracle(const SystemProblem& problem) {
  const Space& space = problem.space();
  const bool hilbert = space.exponent() == 2.0;
  const OracleDescriptor& desc = problem.oracle();
  OracleResult out;

  auto tiny = [&]() {
    try {
      return tiny_alpha_solution(problem);
    } catch (const std::exception& e) {
      throw NoOracle(std::string("tiny-alpha solve failed: ") + e.what());
    }
  };

  if (desc.kind == OracleDescriptor::Kind::DeclaredAffineSet) {
    if (!hilbert) {
      out.xhat = tiny();
      out.route = "tiny-alpha";
      return out;
    }
    Vector x = desc.point;
    if (desc.basis.cols() > 0) {
      const Vector coef = desc.basis.completeOrthogonalDecomposition().solve(desc.point);
      x = desc.point - desc.basis * coef;
    }
    const double res = problem.max_residual(x);
    if (!(res <= 1e-8 * std::max(1.0, space.norm(x)))) {
      throw NoOracle("declared solution set does not solve the system (residual " +
                     std::to_string(res) + ")");
    }
    out.xhat = x;
    out.route = "declared-set-projection";
    require_agreement(space, out.xhat, tiny(), "projection", out);
    return out;
  }

  if (!all_affine(problem)) {
    throw NoOracle("no oracle route: equations are nonlinear and no solution set is declared");
  }
  if (!hilbert) {
    out.xhat = tiny();
    out.route = "tiny-alpha";
    return out;
  }
  out.xhat = stacked_min_norm(problem);
  const double res = problem.max_residual(out.xhat);
  if (!(res <= 1e-8 * std::max(1.0, space.norm(out.xhat)))) {
    throw NoOracle("stacked linear system is inconsistent (residual " + std::to_string(res) + ")");
  }
  out.route = "pseudoinverse";
  require_agreement(space, out.xhat, tiny(), "pseudoinverse", out);
  return out;
}

VariationalReport variational_inequality_check(const Space& space, const Vector& xhat,
                                               const std::vector<Vector>& solution_samples,
                                               double tol) {
  space.require_dim(xhat);
  VariationalReport r;
  r.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < solution_samples.size(); ++k) {
    space.require_dim(solution_samples[k]);
    const double v = dual_pair(xhat, space.duality_map(xhat - solution_samples[k]));
    if (v > r.max_value) {
      r.max_value = v;
      r.worst_sample = k;
    }
  }
  if (solution_samples.empty()) r.max_value = 0.0;
  r.pass = r.max_value <= tol;
  return r;
}

RateFit fit_rate(const std::vector<double>& errors, const std::vector<double>& alphas,
                 double tail_fraction) {
  if (errors.size() != alphas.size()) throw ContractViolation("errors and alphas differ in length");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ContractViolation("tail_fraction must lie in (0, 1]");
  }
  const std::size_t n = errors.size();
  const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  if (count < 5) throw ContractViolation("rate fit needs at least 5 tail points");
  const std::size_t start = n - count;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    if (!(errors[i] > 0.0) || !(alphas[i] > 0.0)) {
      throw ContractViolation("rate fit needs positive errors and alphas");
    }
    mx += std::log(alphas[i]);
    my += std::log(errors[i]);
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double dx = std::log(alphas[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (!(sxx > 0.0)) throw ContractViolation("rate fit needs varying alphas");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = count;
  double ss = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double e = std::log(errors[i]) - (fit.intercept + fit.slope * std::log(alphas[i]));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(count));
  return fit;
}

double stagnation_floor(const std::vector<double>& errors) {
  if (errors.empty()) throw ContractViolation("stagnation floor of an empty sequence");
  const std::size_t n = errors.size();
  const auto five_pct = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n)));
  const std::size_t window = std::min(n, std::max<std::size_t>(10, five_pct));
  return *std::min_element(errors.end() - static_cast<std::ptrdiff_t>(window), errors.end());
}

} // namespace pirm
