#include "errors.hpp"
#include "fixtures.hpp"
#include "inner.hpp"
#include "operators.hpp"

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

LinearAction matrix_action(const Matrix& m) {
  return {static_cast<int>(m.rows()), [m](const Vector& v) { return Vector(m * v); }};
}

std::vector<Operator> inner_catalog(const Space& space) {
  const int d = space.dim();
  Rng rng(66);
  std::vector<Operator> ops;
  const Matrix g = Matrix::Random(d, d);
  if (space.is_hilbert()) ops.push_back(Operator::psd_linear(g * g.transpose()));
  ops.push_back(Operator::residual_of_nonexpansive(
      NonexpansiveMap::linear(fixtures::doubly_stochastic(rng, d)), space));
  ops.push_back(Operator::residual_of_nonexpansive(
      NonexpansiveMap::box(Vector::Constant(d, -0.3), Vector::Constant(d, 0.4)), space));
  std::vector<ScalarFunction> fs(static_cast<std::size_t>(d), ScalarFunction{0.1, 0.5, 1.0, 0.0});
  ops.push_back(Operator::affine_residual(Operator::diagonal_monotone(fs), Vector::Ones(d)));
  return ops;
}

} // namespace

TEST(Inner, SolveRegularizedExamples) {
  const Space h2 = Space::hilbert(2);
  const Operator id =
      Operator::residual_of_nonexpansive(NonexpansiveMap::linear(Matrix::Zero(2, 2)), h2);
  const InnerResult a = solve_regularized(id, 1.0, vec({4, 2}), {}, h2);
  EXPECT_LE((a.x - vec({2, 1})).norm(), 1e-10);

  const Space h1 = Space::hilbert(1);
  const InnerResult b =
      solve_regularized(Operator::psd_linear(Matrix::Constant(1, 1, 2.0)), 1.0, vec({3}), {}, h1);
  EXPECT_NEAR(b.x[0], 1.0, 1e-12);
  EXPECT_EQ(b.method, InnerMethod::DirectLinear);

  InnerConfig cfg;
  cfg.tol = 1e-12;
  cfg.method = InnerMethod::ContractionFixedPoint;
  const Operator half =
      Operator::residual_of_nonexpansive(NonexpansiveMap::linear(Matrix::Constant(1, 1, 0.5)), h1);
  const InnerResult c = solve_regularized(half, 0.5, vec({1}), cfg, h1);
  EXPECT_NEAR(c.x[0], 1.0, 1e-11);
  EXPECT_LE(c.residual, cfg.tol);
  EXPECT_EQ(c.method, InnerMethod::ContractionFixedPoint);
}

TEST(Inner, RejectsBadArguments) {
  const Space h1 = Space::hilbert(1);
  const Operator m = Operator::psd_linear(Matrix::Identity(1, 1));
  EXPECT_THROW(solve_regularized(m, 0.0, vec({1}), {}, h1), ContractViolation);
  EXPECT_THROW(solve_regularized(m, -1.0, vec({1}), {}, h1), ContractViolation);
  InnerConfig bad;
  bad.tol = 0.0;
  EXPECT_THROW(solve_regularized(m, 1.0, vec({1}), bad, h1), ContractViolation);
}

TEST(Inner, NonConvergenceCarriesLastResidual) {
  const Space h1 = Space::hilbert(1);
  const Operator near_id =
      Operator::residual_of_nonexpansive(NonexpansiveMap::linear(Matrix::Constant(1, 1, 1.0)), h1);
  InnerConfig cfg;
  cfg.method = InnerMethod::ContractionFixedPoint;
  cfg.max_iter = 3;
  cfg.tol = 1e-14;
  try {
    solve_regularized(near_id, 1e-3, vec({1}), cfg, h1);
    FAIL() << "expected InnerSolveError";
  } catch (const InnerSolveError& e) {
    EXPECT_GT(e.last_residual(), cfg.tol);
    EXPECT_EQ(e.iterations(), 3);
  }
}

TEST(Inner, ResidualPostconditionAcrossCatalog) {
  for (const Space& space : {Space::hilbert(6), Space::lp(3, 6), Space::lp(1.5, 6)}) {
    Rng rng(42);
    for (const auto& op : inner_catalog(space)) {
      for (double c : {1e-3, 1e-1, 1.0}) {
        for (int k = 0; k < 20; ++k) {
          InnerConfig cfg;
          cfg.tol = 1e-9;
          cfg.max_iter = 200000;
          const Vector b = gaussian_vector(rng, space.dim());
          const InnerResult r = solve_regularized(op, c, b, cfg, space);
          EXPECT_LE(r.residual, cfg.tol);
          EXPECT_LE(space.norm(op.apply(r.x) + c * r.x - b), cfg.tol * (1 + 1e-6));
        }
      }
    }
  }
}

TEST(Inner, StabilityUnderDataPerturbation) {
  for (const Space& space : {Space::hilbert(6), Space::lp(3, 6)}) {
    Rng rng(5);
    for (const auto& op : inner_catalog(space)) {
      for (double c : {1e-2, 1.0}) {
        InnerConfig cfg;
        cfg.tol = 1e-10;
        cfg.max_iter = 100000;
        const Vector b = gaussian_vector(rng, space.dim());
        const Vector w = 0.1 * gaussian_vector(rng, space.dim());
        const Vector x1 = solve_regularized(op, c, b, cfg, space).x;
        const Vector x2 = solve_regularized(op, c, b + w, cfg, space).x;
        EXPECT_LE(space.norm(x1 - x2), space.norm(w) / c + 4 * cfg.tol / c);
      }
    }
  }
}

TEST(Inner, ContractionIterationCountBound) {
  const Space space = Space::hilbert(5);
  Rng rng(12);
  const Operator op = Operator::residual_of_nonexpansive(
      NonexpansiveMap::linear(random_orthogonal(rng, 5)), space);
  for (double c : {0.1, 0.5, 1.0}) {
    InnerConfig cfg;
    cfg.method = InnerMethod::ContractionFixedPoint;
    cfg.tol = 1e-10;
    const Vector b = gaussian_vector(rng, 5);
    const Vector guess = Vector::Zero(5);
    const InnerResult r = solve_regularized(op, c, b, cfg, space, guess);
    InnerConfig direct;
    direct.method = InnerMethod::DirectLinear;
    const Vector exact = solve_regularized(op, c, b, direct, space).x;
    const double bound =
        std::ceil(std::log(cfg.tol / (guess - exact).norm()) / std::log(1.0 / (1.0 + c))) + 1;
    EXPECT_LE(r.iterations, bound);
  }
}

TEST(Inner, DampedNewtonOnNonlinearDiagonal) {
  const Space space = Space::hilbert(3);
  std::vector<ScalarFunction> fs(3, ScalarFunction{0.0, 2.0, 0.0, 0.0});
  const Operator op = Operator::diagonal_monotone(fs);
  EXPECT_EQ(select_method(op), InnerMethod::DampedNewton);
  const InnerResult r = solve_regularized(op, 1.0, vec({3, 0, -3}), {}, space);
  // 2 t^3 + t = 3 has the root t = 1.
  EXPECT_NEAR(r.x[0], 1.0, 1e-10);
  EXPECT_NEAR(r.x[1], 0.0, 1e-10);
  EXPECT_NEAR(r.x[2], -1.0, 1e-10);
}

TEST(Inner, ShiftedLinearExamples) {
  const Space h2 = Space::hilbert(2);
  const auto zero = solve_shifted_linear(matrix_action(Matrix::Zero(2, 2)), 2.0, vec({4, 6}), {}, h2);
  EXPECT_LE((zero.s - vec({2, 3})).norm(), 1e-14);

  const Space h1 = Space::hilbert(1);
  const auto one = solve_shifted_linear(matrix_action(Matrix::Identity(1, 1)), 1.0, vec({4}), {}, h1);
  EXPECT_NEAR(one.s[0], 2.0, 1e-14);

  const Matrix d = vec({0, 10}).asDiagonal();
  const auto r = solve_shifted_linear(matrix_action(d), 0.1, vec({1, 1}), {}, h2);
  EXPECT_NEAR(r.s[0], 10.0, 1e-12);
  EXPECT_NEAR(r.s[1], 1.0 / 10.1, 1e-12);
  EXPECT_TRUE(r.resolvent_bound_ok);
  EXPECT_LE(r.s.norm(), std::sqrt(2.0) / 0.1);

  EXPECT_THROW(solve_shifted_linear(matrix_action(d), 0.0, vec({1, 1}), {}, h2), ContractViolation);
}

TEST(Inner, ShiftedLinearDetectsNonAccretiveDerivative) {
  const Space h1 = Space::hilbert(1);
  EXPECT_THROW(solve_shifted_linear(matrix_action(Matrix::Constant(1, 1, -0.5)), 1.0, vec({1}), {}, h1),
               ContractViolation);
}

TEST(Inner, ResolventBoundOnAccretiveDerivatives) {
  const Space space = Space::hilbert(8);
  Rng rng(77);
  for (int k = 0; k < 10; ++k) {
    const Matrix g = Matrix::Random(8, 8);
    const Matrix q = random_orthogonal(rng, 8);
    for (const Matrix& l : {Matrix(g * g.transpose()), Matrix(Matrix::Identity(8, 8) - q)}) {
      for (double alpha : {1e-3, 0.1, 1.0}) {
        const Vector r = gaussian_vector(rng, 8);
        const auto s = solve_shifted_linear(matrix_action(l), alpha, r, {}, space);
        EXPECT_LE(s.s.norm(), r.norm() / alpha + 1e-10 / alpha);
        EXPECT_LE(((alpha * Matrix::Identity(8, 8) + l) * s.s - r).norm(), 1e-10);
      }
    }
  }
}

TEST(Inner, AssembleRecoversMatrix) {
  const Matrix m = Matrix::Random(4, 4);
  EXPECT_EQ(assemble(matrix_action(m)), m);
}
