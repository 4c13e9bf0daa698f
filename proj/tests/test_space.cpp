#include "errors.hpp"
#include "random.hpp"
#include "space.hpp"

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

} // namespace

TEST(Space, RejectsDegenerateExponents) {
  EXPECT_THROW(Space::lp(1.0, 3), ContractViolation);
  EXPECT_THROW(Space::lp(0.5, 3), ContractViolation);
  EXPECT_THROW(Space::lp(INFINITY, 3), ContractViolation);
  EXPECT_THROW(Space::hilbert(0), ContractViolation);
}

TEST(Space, NormExamples) {
  EXPECT_DOUBLE_EQ(Space::hilbert(2).norm(vec({3, 4})), 5.0);
  EXPECT_NEAR(Space::lp(3, 2).norm(vec({1, 1})), 1.259921, 1e-6);
  EXPECT_EQ(Space::lp(1.5, 3).norm(Vector::Zero(3)), 0.0);
  EXPECT_THROW(Space::hilbert(2).norm(Vector::Zero(3)), ContractViolation);
}

TEST(Space, NormIsHomogeneous) {
  const Space s = Space::lp(3.5, 6);
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const Vector x = gaussian_vector(rng, 6);
    EXPECT_NEAR(s.norm(-2.5 * x), 2.5 * s.norm(x), 1e-12 * s.norm(x));
  }
}

TEST(Space, DualPairExamples) {
  EXPECT_DOUBLE_EQ(dual_pair(vec({1, 2}), vec({3, 4})), 11.0);
  EXPECT_DOUBLE_EQ(dual_pair(Vector::Zero(2), vec({3, 4})), 0.0);
  EXPECT_DOUBLE_EQ(dual_pair(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_THROW(dual_pair(vec({1, 2}), vec({1})), ContractViolation);
}

TEST(Space, DualityMapExamples) {
  const Vector h = Space::hilbert(2).duality_map(vec({3, 4}));
  EXPECT_EQ(h, vec({3, 4}));
  EXPECT_EQ(Space::lp(4, 2).duality_map(vec({2, 0})), vec({2, 0}));

  const Space l3 = Space::lp(3, 2);
  const Vector j = l3.duality_map(vec({1, 1}));
  const double expect = std::pow(2.0, -1.0 / 3.0);
  EXPECT_NEAR(j[0], expect, 1e-12);
  EXPECT_NEAR(j[1], expect, 1e-12);
  EXPECT_NEAR(dual_pair(vec({1, 1}), j), std::pow(2.0, 2.0 / 3.0), 1e-12);
  EXPECT_EQ(l3.duality_map(Vector::Zero(2)), Vector::Zero(2));
}

TEST(Space, DualityIdentitiesOnRandomVectors) {
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const Space s = Space::lp(p, 20);
    Rng rng(derive_seed(5, static_cast<std::uint64_t>(p * 10)));
    for (int k = 0; k < 200; ++k) {
      const Vector x = gaussian_vector(rng, 20) * (1.0 + k % 7);
      const Vector j = s.duality_map(x);
      const double n = s.norm(x);
      EXPECT_LE(std::abs(dual_pair(x, j) - n * n), 1e-10 * std::max(1.0, n * n));
      EXPECT_LE(std::abs(s.dual_norm(j) - n), 1e-10 * std::max(1.0, n));
    }
  }
}

TEST(Space, DualityMapPositivelyHomogeneous) {
  const Space s = Space::lp(1.7, 8);
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector x = gaussian_vector(rng, 8);
    const double lambda = 0.1 + k;
    const Vector lhs = s.duality_map(lambda * x);
    const Vector rhs = lambda * s.duality_map(x);
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * rhs.norm());
  }
}

TEST(Space, HilbertMatchesL2) {
  const Space h = Space::hilbert(9);
  const Space l2 = Space::lp(2.0, 9);
  Rng rng(17);
  for (int k = 0; k < 50; ++k) {
    const Vector x = gaussian_vector(rng, 9);
    const Vector f = gaussian_vector(rng, 9);
    EXPECT_NEAR(h.norm(x), l2.norm(x), 1e-14 * h.norm(x));
    EXPECT_LE((h.duality_map(x) - l2.duality_map(x)).norm(), 1e-14 * h.norm(x));
    EXPECT_NEAR(h.dual_norm(f), l2.dual_norm(f), 1e-14 * h.dual_norm(f));
  }
}

TEST(Space, ModulusOfSmoothnessBounds) {
  EXPECT_EQ(Space::hilbert(2).modulus_smoothness_bound(0.0), 0.0);
  EXPECT_NEAR(Space::lp(3, 2).modulus_smoothness_bound(0.1), 0.02, 1e-15);
  EXPECT_NEAR(Space::lp(1.5, 2).modulus_smoothness_bound(0.01), 0.001 / 1.5, 1e-15);
  EXPECT_THROW(Space::hilbert(2).modulus_smoothness_bound(-1.0), ContractViolation);
  EXPECT_NEAR(Space::hilbert(1).modulus_smoothness_bound(0.75), std::sqrt(1 + 0.5625) - 1, 1e-15);
}

TEST(Space, SmoothnessRatio) {
  const Space s = Space::lp(3, 2);
  EXPECT_EQ(s.smoothness_ratio_bound(0.0), 0.0);
  EXPECT_NEAR(s.smoothness_ratio_bound(0.1), 0.2, 1e-14);
}

TEST(Space, ModulusOfConvexityBounds) {
  EXPECT_EQ(Space::hilbert(2).modulus_convexity_bound(0.0), 0.0);
  EXPECT_NEAR(Space::lp(3, 2).modulus_convexity_bound(1.0), 1.0 / 24.0, 1e-15);
  EXPECT_NEAR(Space::lp(1.5, 2).modulus_convexity_bound(0.4), 0.005, 1e-15);
  EXPECT_THROW(Space::hilbert(2).modulus_convexity_bound(2.5), ContractViolation);
  EXPECT_THROW(Space::hilbert(2).modulus_convexity_bound(-0.1), ContractViolation);
}

TEST(Space, ModuliAreMonotone) {
  for (const Space& s : {Space::hilbert(2), Space::lp(1.3, 2), Space::lp(2.0, 2), Space::lp(5, 2)}) {
    double prev_rho = -1.0;
    double prev_delta = -1.0;
    for (int i = 0; i < 100; ++i) {
      const double rho = s.modulus_smoothness_bound(0.05 * i);
      const double delta = s.modulus_convexity_bound(2.0 * i / 99.0);
      EXPECT_GE(rho, prev_rho);
      EXPECT_GE(delta, prev_delta);
      prev_rho = rho;
      prev_delta = delta;
    }
  }
}

TEST(Space, PhiExamples) {
  const double l = kFigielConstant;
  EXPECT_EQ(Space::hilbert(2).phi_inverse_uniform(1.0, 0.0), 0.0);
  EXPECT_NEAR(Space::hilbert(2).phi_inverse_uniform(1.0, 1.0), 1.0 / (2 * l * 64), 1e-15);
  EXPECT_NEAR(Space::lp(1.5, 2).phi_inverse_uniform(5.0, 2.0), 0.5 / (256 * l) * 4, 1e-15);
  EXPECT_THROW(Space::hilbert(2).phi_inverse_uniform(0.0, 1.0), ContractViolation);
  EXPECT_THROW(Space::hilbert(2).phi_inverse_function(-1.0, 1.0), ContractViolation);
}

TEST(Space, PhiInverseRoundTrip) {
  EXPECT_EQ(Space::hilbert(2).phi_inverse_function(1.0, 0.0), 0.0);
  EXPECT_NEAR(Space::hilbert(2).phi_inverse_function(1.0, 0.0045956), 1.0, 1e-4);
  const double u = Space::hilbert(2).phi_inverse_uniform(1.0, 1.0);
  EXPECT_NEAR(Space::hilbert(2).phi_inverse_function(1.0, u), 1.0, 1e-9);

  Rng rng(23);
  for (const Space& s : {Space::lp(3, 2), Space::lp(1.5, 2), Space::hilbert(2), Space::lp(4, 2)}) {
    for (int k = 0; k < 50; ++k) {
      const Vector st = uniform_vector(rng, 2, 0.01, 10.0);
      const double phi = s.phi_inverse_uniform(st[0], st[1]);
      EXPECT_NEAR(s.phi_inverse_function(st[0], phi), st[1], 1e-12 * st[1]);
    }
  }
}

TEST(Space, PhiStrictlyIncreasing) {
  const Space s = Space::lp(3, 2);
  double prev = -1.0;
  for (int i = 0; i < 100; ++i) {
    const double v = s.phi_inverse_uniform(2.0, 0.1 * i);
    EXPECT_GT(v, prev);
    prev = v;
  }
}
