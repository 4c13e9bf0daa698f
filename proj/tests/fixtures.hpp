#pragma once

// Test systems shared by the unit and acceptance suites.

#include "diagnostics.hpp"
#include "operators.hpp"
#include "pirm.hpp"
#include "random.hpp"
#include "space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace pirm::fixtures {

struct PsdSystem {
  SystemProblem problem;
  Vector xhat;
  Vector x0;
  std::vector<Matrix> matrices;
  Matrix basis;  // orthogonal basis the matrices are built on
};

/// Dimension-20 Hilbert system of three singular PSD equations. Equation i
/// acts on 10 basis columns; together they span columns 0..14, so the
/// solution set is a 5-dimensional affine set. Eigenvalues lie in [0.75, 1].
inline PsdSystem psd_system(std::uint64_t seed = 2024, double solution_norm = 0.1) {
  constexpr int d = 20;
  Rng rng(derive_seed(seed, 1));
  const Matrix q = random_orthogonal(rng, d);
  const std::vector<std::vector<int>> cols = {
      {0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
      {5, 6, 7, 8, 9, 10, 11, 12, 13, 14},
      {0, 1, 2, 3, 4, 10, 11, 12, 13, 14},
  };
  const Space space = Space::hilbert(d);
  Rng pr(derive_seed(seed, 2));
  const Vector particular = random_vector_with_norm(pr, space, solution_norm);

  std::vector<Matrix> mats;
  std::vector<Operator> eqs;
  Rng er(derive_seed(seed, 3));
  for (const auto& c : cols) {
    Matrix m = Matrix::Zero(d, d);
    const Vector lambda = uniform_vector(er, static_cast<int>(c.size()), 0.75, 1.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      m += lambda[static_cast<int>(k)] * q.col(c[k]) * q.col(c[k]).transpose();
    }
    m = 0.5 * (m + m.transpose());
    mats.push_back(m);
    eqs.push_back(Operator::affine_residual(Operator::psd_linear(m), m * particular));
  }
  OracleDescriptor oracle;
  oracle.kind = OracleDescriptor::Kind::Pseudoinverse;
  SystemProblem problem(space, eqs, std::nullopt, oracle);
  const Vector xhat = min_norm_oracle(problem).xhat;
  Rng xr(derive_seed(seed, 4));
  const Vector x0 = xhat + random_vector_with_norm(xr, space, 1.0);
  return {problem.with_known_solution(xhat), xhat, x0, mats, q};
}

struct NonexpansiveSystem {
  SystemProblem problem;
  Vector xhat;
  std::vector<Matrix> maps;
};

inline Matrix plane_rotation(int d, int i, int j, double angle) {
  Matrix r = Matrix::Identity(d, d);
  r(i, i) = std::cos(angle);
  r(j, j) = std::cos(angle);
  r(i, j) = -std::sin(angle);
  r(j, i) = std::sin(angle);
  return r;
}

/// Hilbert system A_i(x) = (I - T_i) x - (I - T_i) c with rotations T_i in
/// overlapping coordinate planes of a random basis; the common fixed space
/// has dimension d - 6.
inline NonexpansiveSystem rotation_system(std::uint64_t seed = 7, int d = 12) {
  Rng rng(derive_seed(seed, 1));
  const Matrix q = random_orthogonal(rng, d);
  const Space space = Space::hilbert(d);
  const Vector c = random_vector_with_norm(rng, space, 0.5);
  const std::vector<std::vector<int>> planes = {{0, 1, 2, 3}, {2, 3, 4, 5}, {4, 5, 0, 1}};
  std::vector<Operator> eqs;
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const auto& p = planes[i];
    const Matrix r = plane_rotation(d, p[0], p[1], 0.7 + 0.3 * static_cast<double>(i)) *
                     plane_rotation(d, p[2], p[3], 1.1 + 0.2 * static_cast<double>(i));
    const Matrix t = q * r * q.transpose();
    maps.push_back(t);
    const Operator a = Operator::residual_of_nonexpansive(NonexpansiveMap::linear(t), space, seed);
    eqs.push_back(Operator::affine_residual(a, (Matrix::Identity(d, d) - t) * c));
  }
  OracleDescriptor oracle;
  oracle.kind = OracleDescriptor::Kind::Pseudoinverse;
  SystemProblem problem(space, eqs, std::nullopt, oracle);
  const Vector xhat = min_norm_oracle(problem).xhat;
  return {problem.with_known_solution(xhat), xhat, maps};
}

/// Random doubly stochastic matrix (convex combination of permutations);
/// nonexpansive in every l^p norm.
inline Matrix doubly_stochastic(Rng& rng, int d, int terms = 4) {
  Matrix m = Matrix::Zero(d, d);
  const Vector w = uniform_vector(rng, terms, 0.1, 1.0);
  const double total = w.sum();
  for (int k = 0; k < terms; ++k) {
    std::vector<int> perm(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < d; ++i) m(i, perm[static_cast<std::size_t>(i)]) += w[k] / total;
  }
  return m;
}

// Representative members of every catalog variant in a given space.
inline std::vector<Operator> catalog(const Space& space, std::uint64_t seed) {
  const int d = space.dim();
  Rng rng(seed);
  std::vector<Operator> ops;
  if (space.is_hilbert()) {
    const Matrix g = Matrix::Random(d, d);
    ops.push_back(Operator::psd_linear(g * g.transpose()));
    const Matrix q = random_orthogonal(rng, d);
    ops.push_back(Operator::residual_of_nonexpansive(NonexpansiveMap::linear(q), space, seed));
    ops.push_back(Operator::residual_of_nonexpansive(
        NonexpansiveMap::ball(gaussian_vector(rng, d), 0.8), space, seed));
  }
  ops.push_back(Operator::residual_of_nonexpansive(
      NonexpansiveMap::linear(doubly_stochastic(rng, d)), space, seed));
  ops.push_back(Operator::residual_of_nonexpansive(
      NonexpansiveMap::box(Vector::Constant(d, -0.5), Vector::Constant(d, 0.7)), space, seed));
  ops.push_back(Operator::residual_of_nonexpansive(
      NonexpansiveMap::compose({NonexpansiveMap::linear(doubly_stochastic(rng, d)),
                                NonexpansiveMap::box(Vector::Constant(d, -1), Vector::Ones(d))}),
      space, seed));
  std::vector<ScalarFunction> fs(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    fs[static_cast<std::size_t>(i)] = {0.2 * i, 0.1, 1.0, 0.3};
  }
  ops.push_back(Operator::diagonal_monotone(fs));
  ops.push_back(Operator::affine_residual(ops.back(), gaussian_vector(rng, d)));
  return ops;
}

} // namespace pirm::fixtures
