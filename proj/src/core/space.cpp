#include "space.hpp"

#include "errors.hpp"

#include <cmath>
#include <string>

namespace pirm {

namespace {

bool finite_entries(const Vector& x) { return x.allFinite(); }

void require_same_dim(const Vector& x, const Vector& f) {
  if (x.size() != f.size()) {
    throw ContractViolation("dimension mismatch: " + std::to_string(x.size()) +
                            " vs " + std::to_string(f.size()));
  }
}

// (sum |x_i|^r)^(1/r), scaled by the largest entry to stay clear of overflow.
double lr_norm(const Vector& x, double r) {
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc += std::pow(std::abs(x[i]) / scale, r);
  }
  return scale * std::pow(acc, 1.0 / r);
}

} // namespace

double dual_pair(const Vector& x, const Vector& f) {
  require_same_dim(x, f);
  return x.dot(f);
}

Space::Space(Kind kind, double p, int dim)
    : kind_(kind), p_(p), q_(p / (p - 1.0)), dim_(dim) {}

Space Space::hilbert(int dim) {
  if (dim < 1) throw ContractViolation("space dimension must be >= 1");
  return Space(Kind::Hilbert, 2.0, dim);
}

Space Space::lp(double p, int dim) {
  if (dim < 1) throw ContractViolation("space dimension must be >= 1");
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw ContractViolation("l^p exponent must satisfy 1 < p < inf, got " +
                            std::to_string(p));
  }
  return Space(Kind::Lp, p, dim);
}

void Space::require_dim(const Vector& x) const {
  if (x.size() != dim_) {
    throw ContractViolation("vector of dimension " + std::to_string(x.size()) +
                            " used in space of dimension " +
                            std::to_string(dim_));
  }
  if (!finite_entries(x)) throw ContractViolation("vector has non-finite entries");
}

double Space::norm(const Vector& x) const {
  require_dim(x);
  if (p_ == 2.0) return x.norm();
  return lr_norm(x, p_);
}

double Space::dual_norm(const Vector& f) const {
  require_dim(f);
  if (p_ == 2.0) return f.norm();
  return lr_norm(f, q_);
}

Vector Space::duality_map(const Vector& x) const {
  require_dim(x);
  if (p_ == 2.0) return x;
  const double nx = lr_norm(x, p_);
  Vector j = Vector::Zero(x.size());
  if (nx == 0.0) return j;
  // ||x||^(2-p) |x_i|^(p-1) written as ||x|| (|x_i|/||x||)^(p-1).
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    const double mag = nx * std::pow(std::abs(x[i]) / nx, p_ - 1.0);
    j[i] = std::copysign(mag, x[i]);
  }
  return j;
}

double Space::modulus_smoothness_bound(double tau) const {
  if (!(tau >= 0.0)) throw ContractViolation("modulus argument must be >= 0");
  if (kind_ == Kind::Hilbert) {
    // sqrt(1 + tau^2) - 1 without cancellation.
    return tau * tau / (std::sqrt(1.0 + tau * tau) + 1.0);
  }
  if (p_ >= 2.0) return (p_ - 1.0) * tau * tau;
  return std::pow(tau, p_) / p_;
}

double Space::smoothness_ratio_bound(double tau) const {
  if (tau == 0.0) return 0.0;
  return modulus_smoothness_bound(tau) / tau;
}

double Space::modulus_convexity_bound(double eps) const {
  if (!(eps >= 0.0 && eps <= 2.0)) {
    throw ContractViolation("modulus of convexity argument must lie in [0, 2]");
  }
  if (p_ < 2.0) return (p_ - 1.0) * eps * eps / 16.0;
  return std::pow(eps, p_) / (p_ * std::pow(2.0, p_));
}

double Space::phi_inverse_uniform(double s, double t) const {
  if (!(s > 0.0)) throw ContractViolation("phi requires s > 0");
  if (!(t >= 0.0)) throw ContractViolation("phi requires t >= 0");
  if (smooth_branch()) {
    return std::pow(t, p_) /
           (p_ * kFigielConstant * std::pow(8.0, p_) * std::pow(s, p_ - 2.0));
  }
  const double c = (p_ - 1.0) / (256.0 * kFigielConstant);
  return c * t * t;
}

double Space::phi_inverse_function(double s, double u) const {
  if (!(s > 0.0)) throw ContractViolation("phi inverse requires s > 0");
  if (!(u >= 0.0)) throw ContractViolation("phi inverse requires u >= 0");
  if (smooth_branch()) {
    return std::pow(u * p_ * kFigielConstant * std::pow(8.0, p_) *
                        std::pow(s, p_ - 2.0),
                    1.0 / p_);
  }
  const double c = (p_ - 1.0) / (256.0 * kFigielConstant);
  return std::sqrt(u / c);
}

} // namespace pirm
