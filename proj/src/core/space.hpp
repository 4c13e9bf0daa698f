#pragma once

#include <Eigen/Dense>

namespace pirm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Figiel constant, upper end of the admissible range (1, 1.7).
inline constexpr double kFigielConstant = 1.7;

/// Coordinate duality between X and X* in the finite-dimensional model.
double dual_pair(const Vector& x, const Vector& f);

/**
 * Finite-dimensional model of a uniformly smooth, uniformly convex space:
 * either R^d with the Euclidean norm (Hilbert) or R^d with the l^p norm,
 * 1 < p < inf (coordinate truncation of l^p).
 *
 * Besides the norm and the normalized duality mapping J, the class owns the
 * closed-form bounds for the moduli of smoothness and convexity and the
 * inverse-uniform-accretivity modulus phi(s, t) of operators I - T with T
 * nonexpansive. The validators in schedules.hpp are built on those bounds.
 *
 * All members are pure; a Space is a small immutable value.
 */
class Space {
public:
  enum class Kind { Hilbert, Lp };

  static Space hilbert(int dim);
  static Space lp(double p, int dim);

  Kind kind() const noexcept { return kind_; }
  bool is_hilbert() const noexcept { return kind_ == Kind::Hilbert; }
  int dim() const noexcept { return dim_; }
  /// p of the l^p norm; 2 for Hilbert.
  double exponent() const noexcept { return p_; }
  /// Conjugate exponent q = p / (p - 1) of the dual space.
  double dual_exponent() const noexcept { return q_; }

  double norm(const Vector& x) const;
  /// Norm of a functional in X* (l^q norm).
  double dual_norm(const Vector& f) const;
  Vector duality_map(const Vector& x) const;

  /// Upper bound for the modulus of smoothness rho_X(tau).
  double modulus_smoothness_bound(double tau) const;
  /// h_X(tau) = rho_X(tau) / tau from the smoothness bound; 0 at tau = 0.
  double smoothness_ratio_bound(double tau) const;
  /// Lower bound for the modulus of convexity delta_X(eps), eps in [0, 2].
  double modulus_convexity_bound(double eps) const;

  /// phi(s, t) for A = I - T, T nonexpansive.
  double phi_inverse_uniform(double s, double t) const;
  /// Inverse of t -> phi(s, t) at fixed s.
  double phi_inverse_function(double s, double u) const;

  void require_dim(const Vector& x) const;

  friend bool operator==(const Space&, const Space&) = default;

private:
  Space(Kind kind, double p, int dim);

  // p >= 2 branch of the geometric inequalities (Hilbert included).
  bool smooth_branch() const noexcept { return p_ >= 2.0; }

  Kind kind_;
  double p_;
  double q_;
  int dim_;
};

} // namespace pirm
