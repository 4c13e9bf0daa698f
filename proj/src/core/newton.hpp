#pragma once

#include "pirm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pirm {

/// Anchors x_i^0 = xhat + A_i'(xhat) v_i of the source condition.
struct SourceAnchors {
  std::vector<Vector> anchors;
  double sum_v_norm = 0.0;
};

SourceAnchors make_source_anchors(const SystemProblem& problem, const Vector& xhat,
                                  const std::vector<Vector>& v);

/**
 * Sufficiency gate of the rate estimate: with
 *   a = 2 rho S / N,  b = 2 rho K S / N,  c = K rho / 2   (S = sum ||v_i||)
 * the estimate needs b + 2 sqrt(a c) < 1 and omega_0 <= M_+.
 */
struct NewtonGate {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double lhs = 0.0;  // b + 2 sqrt(a c)
  bool passed = false;
  /// Roots of c w^2 - (1 - b) w + a; M_+ is +inf when c = 0.
  std::optional<double> m_plus;
  std::optional<double> m_minus;
  std::optional<double> omega0;
  /// "holds", "violated" or "unverifiable" (no reference solution).
  std::string omega0_status = "unverifiable";

  bool rate_claim() const { return passed && omega0_status == "holds"; }
};

NewtonGate newton_gate(std::size_t n_equations, double rho, double k, double sum_v_norm,
                       std::optional<double> omega0 = std::nullopt);

struct NewtonConfig {
  std::vector<Vector> anchors;
  Schedule alpha = Schedule::power_law(ScheduleRole::Alpha, 1.0, 0.5);
  /// Bound on alpha_n / alpha_{n+1}; taken from validate_newton when absent.
  std::optional<double> rho_cert;
  /// Lipschitz constant of the derivatives; estimated when absent.
  std::optional<double> lipschitz;
  double sum_v_norm = 0.0;
  double eta = 1.0;
  InnerConfig inner;
};

/// s_i solves (A_i'(x_n) + alpha/N) s = -A_i(x_n) - (alpha/N)(x_n - x_i^0);
/// x_{n+1} is the mean of x_n + s_i.
StepResult newton_step(const SystemProblem& problem, const Vector& x, double alpha,
                       const std::vector<Vector>& anchors, const InnerConfig& inner,
                       WorkerPool* pool = nullptr);

struct NewtonRun {
  RunTrace trace;
  NewtonGate gate;
  double rho = 0.0;
  /// Lipschitz constant used for the gate; nullopt when it could not be estimated.
  std::optional<double> lipschitz;
};

/// Rows carry omega_n = N ||x_n - xhat|| / alpha_n and the envelope
/// a + b omega_{n-1} + c omega_{n-1}^2 + 10 tol / alpha_n when xhat is known.
NewtonRun run_newton(const SystemProblem& problem, const NewtonConfig& cfg, const Vector& x0,
                     long n_iters, const RunOptions& options = {});

struct StoppingIndex {
  long index = 0;
  /// The admissible set was cut at n_cap.
  bool clamped = false;
};

inline constexpr long kDefaultNCap = 1000000;

/// Largest n <= n_cap with alpha_n^2 >= (delta + h) / eta. Throws
/// NoAdmissibleIndex when even n = 0 fails.
StoppingIndex stopping_index(double delta, double h, double eta, const Schedule& alpha,
                             long n_cap = kDefaultNCap);

/// Newton iteration on perturb(A_i, noise) up to n_star = N(delta, h) + 1.
/// The perturbation of equation i is drawn from derive_seed(noise.seed, i).
NewtonRun run_newton_noisy(const SystemProblem& problem, const NoiseSpec& noise,
                           const NewtonConfig& cfg, const Vector& x0,
                           long n_cap = kDefaultNCap, const RunOptions& options = {});

} // namespace pirm
