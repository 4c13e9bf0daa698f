#pragma once

#include "space.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pirm {

/// Nondecreasing scalar map g(t) = linear*t + cubic*t^3 + saturation*tanh(t) + offset.
/// Nonnegative coefficients make every member monotone.
struct ScalarFunction {
  double linear = 0.0;
  double cubic = 0.0;
  double saturation = 0.0;
  double offset = 0.0;

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
  bool is_affine() const { return cubic == 0.0 && saturation == 0.0; }

  friend bool operator==(const ScalarFunction&, const ScalarFunction&) = default;
};

/// How an invariant of an operator was established at construction.
struct ConstructionCheck {
  bool exact = false;   // closed-form certificate (eigenvalues, norm bound, ...)
  int samples = 0;      // sampled pairs/grid points also checked
  std::string method;
};

/**
 * Nonexpansive self-map T of R^d: a linear map with operator norm <= 1, the
 * metric projection onto a box or a Euclidean ball, or a composition of
 * those. Immutable; copies share state.
 */
class NonexpansiveMap {
public:
  enum class Kind { Linear, Box, Ball, Composition };

  static NonexpansiveMap linear(Matrix t);
  static NonexpansiveMap box(Vector lower, Vector upper);
  static NonexpansiveMap ball(Vector center, double radius);
  /// Maps are applied in list order: maps[0] first.
  static NonexpansiveMap compose(std::vector<NonexpansiveMap> maps);

  Kind kind() const;
  int dim() const;
  Vector apply(const Vector& x) const;
  /// T'(x) v. Throws CapabilityError at a kink of a projection.
  Vector derivative_apply(const Vector& x, const Vector& v) const;
  /// Matrix of T when every component is linear.
  std::optional<Matrix> matrix() const;

  /// Exact certificate of ||T x - T y|| <= ||x - y|| in `space`, when one exists.
  std::optional<std::string> certify(const Space& space) const;

  const Matrix& linear_matrix() const;
  const Vector& box_lower() const;
  const Vector& box_upper() const;
  const Vector& ball_center() const;
  double ball_radius() const;
  const std::vector<NonexpansiveMap>& components() const;

  struct Impl;

private:
  explicit NonexpansiveMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// A(x) = matrix * x - data.
struct AffineForm {
  Matrix matrix;
  Vector data;
};

/// A(x) = x - map(x) - shift.
struct NonexpansiveForm {
  NonexpansiveMap map;
  Vector shift;
};

/**
 * Accretive operator A: R^d -> R^d from the test catalog.
 *
 *  - PsdLinear:              A(x) = M x, M symmetric positive semidefinite
 *  - ResidualOfNonexpansive: A(x) = x - T(x)
 *  - DiagonalMonotone:       A(x)_i = g_i(x_i), g_i nondecreasing
 *  - AffineResidual:         A(x) = F(x) - f
 *  - Sum:                    A(x) = sum_k A_k(x)
 *
 * Sum is used for the sum equation of a system and for perturbed operators
 * F + h B. Values are immutable after construction.
 */
class Operator {
public:
  enum class Kind { PsdLinear, ResidualOfNonexpansive, DiagonalMonotone, AffineResidual, Sum };

  /// Rejects non-symmetric or indefinite matrices (eigenvalues < -1e-12).
  static Operator psd_linear(Matrix m);
  /// Skips the PSD certificate; for negative tests only.
  static Operator unchecked_linear(Matrix m);
  /// Rejects maps that fail the nonexpansiveness check in `space`.
  static Operator residual_of_nonexpansive(NonexpansiveMap t, const Space& space,
                                           std::uint64_t seed = 0);
  static Operator diagonal_monotone(std::vector<ScalarFunction> g);
  static Operator affine_residual(Operator base, Vector data);
  static Operator sum(std::vector<Operator> terms);

  Kind kind() const;
  int dim() const;

  Vector apply(const Vector& x) const;
  /// A'(x) v; throws CapabilityError when the variant is not differentiable at x.
  Vector derivative_apply(const Vector& x, const Vector& v) const;
  /// Structural differentiability (projections may still fail at kinks).
  bool differentiable() const;

  std::optional<AffineForm> affine_form() const;
  std::optional<NonexpansiveForm> nonexpansive_form() const;

  const ConstructionCheck& construction_check() const;

  // Variant accessors; each throws ContractViolation on the wrong kind.
  const Matrix& matrix() const;
  const NonexpansiveMap& nonexpansive_map() const;
  const std::vector<ScalarFunction>& scalar_functions() const;
  const Operator& base() const;
  const Vector& data() const;
  const std::vector<Operator>& terms() const;

  /// True when both handles refer to the same immutable node.
  bool same_node(const Operator& other) const { return impl_ == other.impl_; }

  struct Impl;

private:
  explicit Operator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Data and operator noise levels, with g(t) = growth_constant + growth_slope * t.
struct NoiseSpec {
  double h = 0.0;
  double delta = 0.0;
  double growth_constant = 1.0;
  double growth_slope = 1.0;
  std::uint64_t seed = 0;
  /// Fixed data-noise direction; drawn from the seed when absent.
  std::optional<Vector> direction;

  double growth(double t) const { return growth_constant + growth_slope * t; }
};

/// F -> F + h B and f -> f + delta u for an AffineResidual operator.
/// B is a seeded diagonal monotone map with ||B(x)|| <= g(||x||)/2, so the
/// perturbed operator stays accretive; ||u|| = 1 in the space norm.
Operator perturb(const Operator& op, const NoiseSpec& noise, const Space& space);

/// Sampled sup|g''| (times 1.5) over |t| <= box_radius for diagonal parts;
/// 0 for linear variants. Throws CapabilityError for projection-based maps.
double lipschitz_derivative_constant(const Operator& op, double box_radius = 10.0);

struct AccretivityReport {
  double min_value = 0.0;           // min <A x - A y, J(x - y)>
  double min_normalized_slack = 0.0; // min of the same, divided by max(1, scale)
  int samples = 0;
  bool pass = false;
};

AccretivityReport check_accretive(const Operator& op, const Space& space,
                                  int n_samples, std::uint64_t seed);

/// Samples pairs in the ball of radius R and checks
/// <A x - A y, J(x - y)> >= phi(R, ||A x - A y||). Needs an I - T form.
AccretivityReport check_inverse_uniform_accretive(const Operator& op, const Space& space,
                                                  double radius, int n_samples,
                                                  std::uint64_t seed);

} // namespace pirm
