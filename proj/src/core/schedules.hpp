#pragma once

#include "space.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pirm {

enum class ScheduleRole { Alpha, Gamma, Noise };

/**
 * A parameter sequence indexed by n >= 0.
 *
 * PowerLaw: c0 (n+1)^-k for Alpha and Noise, c0 (n+1)^k for Gamma (k >= 0).
 * Table: explicit values; value(n) past the end throws.
 */
class Schedule {
public:
  static Schedule power_law(ScheduleRole role, double c0, double k);
  static Schedule table(ScheduleRole role, std::vector<double> values);
  static Schedule constant(ScheduleRole role, double value) { return power_law(role, value, 0.0); }

  double value(long n) const;

  ScheduleRole role() const noexcept { return role_; }
  bool is_power_law() const noexcept { return table_.empty(); }
  double coefficient() const noexcept { return c0_; }
  /// Magnitude of the power-law exponent.
  double exponent() const noexcept { return k_; }
  /// Largest valid index for tables; nullopt for power laws.
  std::optional<long> last_index() const;

  std::vector<double> first(long count) const;

private:
  Schedule(ScheduleRole role, double c0, double k, std::vector<double> table)
      : role_(role), c0_(c0), k_(k), table_(std::move(table)) {}

  ScheduleRole role_;
  double c0_ = 0.0;
  double k_ = 0.0;
  std::vector<double> table_;
};

enum class Verdict { SatisfiedSymbolically, TrendsToZeroNumerically, Violated };

std::string to_string(Verdict v);

struct ScheduleReport {
  std::string condition;
  long horizon = 0;
  /// Log-spaced samples (n, quantity) of the limiting quantity.
  std::vector<std::pair<long, double>> trace;
  Verdict verdict = Verdict::Violated;
  std::optional<long> first_violation;
  std::string note;
  std::optional<double> certified_rho;

  bool ok() const { return verdict != Verdict::Violated; }
};

enum class ValidationMode {
  Auto,    // symbolic for power laws, numeric otherwise
  Numeric  // always decide from the trace
};

inline constexpr long kDefaultHorizon = 100000;

/// Conditions i)-iii) of the implicit method: alpha -> 0 and gamma -> inf;
/// gamma |alpha_{n+1} - alpha_n| / alpha_n^2 -> 0 with sum alpha/gamma = inf;
/// h_X(tau_n) phi_R^-1(R1 alpha_n) / alpha_n -> 0 with R1 = 3R^2/2.
std::vector<ScheduleReport> validate_implicit(const Space& space, const Schedule& alpha,
                                              const Schedule& gamma, double radius,
                                              long horizon = kDefaultHorizon,
                                              ValidationMode mode = ValidationMode::Auto);

/// The step-size bounds tau_n <= d, rho(tau_n)/(tau_n alpha_n) <= d^2 and the
/// four asymptotic conditions of the explicit method (six reports).
std::vector<ScheduleReport> validate_explicit(const Space& space, const Schedule& alpha,
                                              const Schedule& gamma, double d,
                                              long horizon = kDefaultHorizon,
                                              ValidationMode mode = ValidationMode::Auto);

/// 1 <= alpha_n / alpha_{n+1} <= rho and alpha_n -> 0; certifies rho.
ScheduleReport validate_newton(const Schedule& alpha, long horizon = kDefaultHorizon,
                               ValidationMode mode = ValidationMode::Auto);

/// (h_n + delta_n) / alpha_n -> 0.
ScheduleReport validate_noisy_coupling(const Schedule& alpha, const Schedule& h,
                                       const Schedule& delta, long horizon = kDefaultHorizon,
                                       ValidationMode mode = ValidationMode::Auto);

struct SchedulePair {
  Schedule alpha;
  Schedule gamma;
};

/// Named presets "hilbert", "lp-large-p", "lp-small-p":
/// alpha_n = (n+1)^-k, gamma_n = (n+1)^(1/2) with the admissible k range of
/// each space family. Unknown names throw ContractViolation listing the presets.
SchedulePair preset(const std::string& name, const Space& space,
                    std::optional<double> k = std::nullopt);
std::vector<std::string> preset_names();

} // namespace pirm
