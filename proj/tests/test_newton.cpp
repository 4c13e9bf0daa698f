#include "diagnostics.hpp"
#include "errors.hpp"
#include "fixtures.hpp"
#include "newton.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pirm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Schedule alpha_law(double k, double c0 = 1.0) { return Schedule::power_law(ScheduleRole::Alpha, c0, k); }

std::vector<Vector> source_elements(int count, int d, double norm, std::uint64_t seed) {
  std::vector<Vector> v;
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    v.push_back(random_vector_with_norm(rng, Space::hilbert(d), norm));
  }
  return v;
}

NewtonConfig config_for(const fixtures::PsdSystem& sys, double v_norm) {
  const SourceAnchors anchors =
      make_source_anchors(sys.problem, sys.xhat, source_elements(3, 20, v_norm, 99));
  NewtonConfig cfg;
  cfg.anchors = anchors.anchors;
  cfg.sum_v_norm = anchors.sum_v_norm;
  cfg.alpha = alpha_law(0.5);
  return cfg;
}

} // namespace

TEST(SourceAnchors, Examples) {
  const auto sys = fixtures::psd_system();
  const auto zero = make_source_anchors(sys.problem, sys.xhat, std::vector<Vector>(3, Vector::Zero(20)));
  for (const auto& a : zero.anchors) EXPECT_EQ(a, sys.xhat);
  EXPECT_EQ(zero.sum_v_norm, 0.0);

  Matrix l(2, 2);
  l << 2, 1, 1, 3;
  const SystemProblem lin(Space::hilbert(2), {Operator::psd_linear(l)}, Vector::Zero(2));
  const auto col = make_source_anchors(lin, Vector::Zero(2), {vec({1, 0})});
  EXPECT_EQ(col.anchors[0], l.col(0));

  const SystemProblem scalar(Space::hilbert(1),
                             {Operator::affine_residual(Operator::psd_linear(Matrix::Identity(1, 1)), vec({2}))},
                             vec({2}));
  const auto s = make_source_anchors(scalar, vec({2}), {vec({0.1})});
  EXPECT_NEAR(s.anchors[0][0], 2.1, 1e-15);
  EXPECT_NEAR(s.sum_v_norm, 0.1, 1e-15);

  EXPECT_THROW(make_source_anchors(scalar, vec({2}), {}), ContractViolation);
}

TEST(NewtonGate, LinearCaseHasInfiniteUpperRoot) {
  const NewtonGate g = newton_gate(3, std::sqrt(2.0), 0.0, 0.3, 5.0);
  EXPECT_TRUE(g.passed);
  EXPECT_EQ(g.lhs, 0.0);
  EXPECT_TRUE(std::isinf(*g.m_plus));
  EXPECT_EQ(g.omega0_status, "holds");
  EXPECT_TRUE(g.rate_claim());
}

TEST(NewtonGate, NonlinearRoots) {
  const NewtonGate g = newton_gate(2, 2.0, 0.5, 0.1, std::nullopt);
  EXPECT_NEAR(g.a, 0.2, 1e-15);
  EXPECT_NEAR(g.b, 0.1, 1e-15);
  EXPECT_NEAR(g.c, 0.5, 1e-15);
  EXPECT_NEAR(g.lhs, 0.1 + 2 * std::sqrt(0.1), 1e-15);
  ASSERT_TRUE(g.passed);
  // Roots of c w^2 - (1 - b) w + a.
  for (double w : {*g.m_plus, *g.m_minus}) EXPECT_NEAR(g.c * w * w - 0.9 * w + g.a, 0.0, 1e-14);
  EXPECT_EQ(g.omega0_status, "unverifiable");
  EXPECT_FALSE(g.rate_claim());

  const NewtonGate big = newton_gate(1, 2.0, 3.0, 1.0, 0.1);
  EXPECT_FALSE(big.passed);
  EXPECT_EQ(big.omega0_status, "violated");
}

TEST(NewtonStep, FixedPointAtSolution) {
  const auto sys = fixtures::psd_system();
  const std::vector<Vector> anchors(3, sys.xhat);
  const StepResult r = newton_step(sys.problem, sys.xhat, 0.3, anchors, {});
  EXPECT_LE((r.next - sys.xhat).norm(), 1e-14);
}

TEST(NewtonStep, ScalarExample) {
  const SystemProblem p(Space::hilbert(1),
                        {Operator::affine_residual(Operator::psd_linear(Matrix::Identity(1, 1)), vec({1}))});
  const StepResult r = newton_step(p, vec({0}), 1.0, {vec({0})}, {});
  EXPECT_NEAR(r.next[0], 0.5, 1e-15);
}

TEST(NewtonStep, LinearStepSolvesRegularizedSubproblems) {
  const auto sys = fixtures::psd_system();
  const NewtonConfig cfg = config_for(sys, 0.1);
  const double alpha = 0.05;
  const StepResult r = newton_step(sys.problem, sys.x0, alpha, cfg.anchors, cfg.inner);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vector res = sys.problem.equations()[i].apply(r.subs[i]) + (alpha / 3) * (r.subs[i] - cfg.anchors[i]);
    EXPECT_LE(res.norm(), cfg.inner.tol);
  }
}

TEST(NewtonStep, NonlinearStepMatchesFormula) {
  const Space s = Space::hilbert(2);
  std::vector<ScalarFunction> fs(2, ScalarFunction{1.0, 1.0, 0.0, 0.0});
  const SystemProblem p(s, {Operator::diagonal_monotone(fs)});
  const Vector x = vec({1, -0.5});
  const StepResult r = newton_step(p, x, 0.2, {Vector::Zero(2)}, {});
  for (int i = 0; i < 2; ++i) {
    const double g = x[i] + x[i] * x[i] * x[i];
    const double dg = 1 + 3 * x[i] * x[i];
    EXPECT_NEAR(r.next[i], x[i] + (-g - 0.2 * x[i]) / (dg + 0.2), 1e-14);
  }
}

TEST(RunNewton, StationaryAtSolution) {
  const auto sys = fixtures::psd_system();
  NewtonConfig cfg;
  cfg.anchors = std::vector<Vector>(3, sys.xhat);
  const NewtonRun run = run_newton(sys.problem, cfg, sys.xhat, 20);
  for (double e : run.trace.errors()) EXPECT_LE(e, 1e-14);
}

TEST(RunNewton, OneIterationIsOneStep) {
  const auto sys = fixtures::psd_system();
  const NewtonConfig cfg = config_for(sys, 0.1);
  const NewtonRun run = run_newton(sys.problem, cfg, sys.x0, 1);
  EXPECT_EQ(run.trace.final_iterate(), newton_step(sys.problem, sys.x0, 1.0, cfg.anchors, cfg.inner).next);
  EXPECT_TRUE(std::isnan(run.trace.rows[0].gamma));
}

TEST(RunNewton, RateAndEnvelope) {
  const auto sys = fixtures::psd_system();
  const NewtonConfig cfg = config_for(sys, 0.1);
  const NewtonRun run = run_newton(sys.problem, cfg, sys.x0, 200);
  ASSERT_TRUE(run.trace.ok());
  EXPECT_TRUE(run.gate.passed);
  EXPECT_NEAR(run.rho, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(run.lipschitz, 0.0);
  const RateFit fit = fit_rate(run.trace.errors(), run.trace.alphas());
  EXPECT_GE(fit.slope, 0.85);
  EXPECT_LE(fit.slope, 1.15);
  for (std::size_t n = 1; n < run.trace.rows.size(); ++n) {
    const auto& row = run.trace.rows[n];
    ASSERT_TRUE(row.envelope_bound);
    EXPECT_LE(*row.omega, *row.envelope_bound) << "n = " << n;
  }
}

TEST(RunNewton, ParallelEqualsSerial) {
  const auto sys = fixtures::psd_system();
  const NewtonConfig cfg = config_for(sys, 0.1);
  RunOptions par;
  par.threads = 3;
  const NewtonRun a = run_newton(sys.problem, cfg, sys.x0, 50);
  const NewtonRun b = run_newton(sys.problem, cfg, sys.x0, 50, par);
  for (std::size_t n = 0; n < a.trace.rows.size(); ++n) EXPECT_EQ(a.trace.rows[n].x, b.trace.rows[n].x);
}

TEST(StoppingIndex, Examples) {
  EXPECT_EQ(stopping_index(0.004, 0.006, 1.0, alpha_law(0.5)).index, 99);
  EXPECT_EQ(stopping_index(0.01, 0.0, 1.0, alpha_law(0.5)).index, 99);
  const Schedule quarter = alpha_law(0.25);
  EXPECT_EQ(stopping_index(1.0, 0.0, 1.0, quarter).index, 0);
  EXPECT_EQ(stopping_index(0.5, 0.5, 1.0, quarter).index, 0);
  EXPECT_THROW(stopping_index(2.0, 0.0, 1.0, quarter), NoAdmissibleIndex);
  EXPECT_THROW(stopping_index(1.0, 1.0, 1.0, quarter), NoAdmissibleIndex);
}

TEST(StoppingIndex, ZeroNoiseIsClamped) {
  const StoppingIndex s = stopping_index(0.0, 0.0, 1.0, alpha_law(0.5), 500);
  EXPECT_EQ(s.index, 500);
  EXPECT_TRUE(s.clamped);
  EXPECT_EQ(stopping_index(0.0, 0.0, 1.0, alpha_law(0.5)).index, kDefaultNCap);
}

TEST(StoppingIndex, AgreesWithLinearSearch) {
  for (double k : {0.25, 0.5, 0.75, 1.0}) {
    for (double c0 : {1.0, 2.0}) {
      const Schedule a = alpha_law(k, c0);
      for (double t : {1e-1, 3e-2, 1e-2, 1e-3, 2.5e-4, 6.25e-5}) {
        long expect = -1;
        for (long n = 0; n <= 100000; ++n) {
          if (a.value(n) * a.value(n) >= t * (1 - 1e-12)) expect = n;
        }
        if (expect < 0) continue;
        const StoppingIndex s = stopping_index(t, 0.0, 1.0, a, 100000);
        EXPECT_EQ(s.index, expect) << "k " << k << " c0 " << c0 << " t " << t;
      }
    }
  }
}

TEST(StoppingIndex, TableSchedule) {
  const Schedule t = Schedule::table(ScheduleRole::Alpha, {1.0, 0.5, 0.3, 0.1});
  EXPECT_EQ(stopping_index(0.09, 0.0, 1.0, t).index, 2);
  EXPECT_EQ(stopping_index(0.001, 0.0, 1.0, t).index, 3);
}

TEST(StoppingIndex, RejectsBadArguments) {
  EXPECT_THROW(stopping_index(-1.0, 0.0, 1.0, alpha_law(0.5)), ContractViolation);
  EXPECT_THROW(stopping_index(0.1, 0.0, 0.0, alpha_law(0.5)), ContractViolation);
}

TEST(RunNewtonNoisy, ZeroNoiseMatchesExactRunUpToCap) {
  const auto sys = fixtures::psd_system();
  const NewtonConfig cfg = config_for(sys, 0.1);
  NoiseSpec noise;
  noise.seed = 4;
  const NewtonRun noisy = run_newton_noisy(sys.problem, noise, cfg, sys.x0, 30);
  const NewtonRun exact = run_newton(sys.problem, cfg, sys.x0, 31);
  ASSERT_EQ(noisy.trace.n_star, 31);
  ASSERT_EQ(noisy.trace.rows.size(), exact.trace.rows.size());
  for (std::size_t n = 0; n < exact.trace.rows.size(); ++n) {
    EXPECT_EQ(noisy.trace.rows[n].x, exact.trace.rows[n].x);
  }
}

TEST(RunNewtonNoisy, StopsAtIndexPlusOne) {
  const auto sys = fixtures::psd_system();
  const NewtonConfig cfg = config_for(sys, 0.1);
  NoiseSpec noise;
  noise.delta = 0.01;
  noise.seed = 4;
  const NewtonRun run = run_newton_noisy(sys.problem, noise, cfg, sys.x0);
  ASSERT_EQ(run.trace.n_star, 100);
  EXPECT_EQ(run.trace.rows.size(), 101u);
  EXPECT_TRUE(run.trace.rows.back().error.has_value());
}

TEST(RunNewtonNoisy, RefusesWhenNoiseTooLarge) {
  const auto sys = fixtures::psd_system();
  const NewtonConfig cfg = config_for(sys, 0.1);
  NoiseSpec noise;
  noise.delta = 5.0;
  noise.seed = 4;
  try {
    run_newton_noisy(sys.problem, noise, cfg, sys.x0);
    FAIL();
  } catch (const NoAdmissibleIndex& e) {
    EXPECT_NE(std::string(e.what()).find("noise exceeds regularization range"), std::string::npos);
  }
}
