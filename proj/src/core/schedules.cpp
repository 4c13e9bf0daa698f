#include "schedules.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace pirm {

// ---------------------------------------------------------------------------
// Schedule

Schedule Schedule::power_law(ScheduleRole role, double c0, double k) {
  if (!std::isfinite(c0) || !std::isfinite(k)) throw ContractViolation("schedule parameters must be finite");
  if (role == ScheduleRole::Noise ? !(c0 >= 0.0) : !(c0 > 0.0)) {
    throw ContractViolation("schedule coefficient must be positive");
  }
  if (!(k >= 0.0)) throw ContractViolation("power-law exponent magnitude must be >= 0");
  return Schedule(role, c0, k, {});
}

Schedule Schedule::table(ScheduleRole role, std::vector<double> values) {
  if (values.empty()) throw ContractViolation("schedule table must be non-empty");
  for (double v : values) {
    if (!std::isfinite(v) || (role == ScheduleRole::Noise ? v < 0.0 : v <= 0.0)) {
      throw ContractViolation("schedule table values must be finite and positive");
    }
  }
  return Schedule(role, 0.0, 0.0, std::move(values));
}

double Schedule::value(long n) const {
  if (n < 0) throw ContractViolation("schedule index must be >= 0");
  if (!table_.empty()) {
    if (static_cast<std::size_t>(n) >= table_.size()) {
      throw ContractViolation("schedule table exhausted at index " + std::to_string(n));
    }
    return table_[static_cast<std::size_t>(n)];
  }
  if (k_ == 0.0) return c0_;
  const double base = static_cast<double>(n) + 1.0;
  return role_ == ScheduleRole::Gamma ? c0_ * std::pow(base, k_) : c0_ * std::pow(base, -k_);
}

std::optional<long> Schedule::last_index() const {
  if (table_.empty()) return std::nullopt;
  return static_cast<long>(table_.size()) - 1;
}

std::vector<double> Schedule::first(long count) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(0L, count)));
  for (long n = 0; n < count; ++n) out.push_back(value(n));
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::SatisfiedSymbolically:
    return "SatisfiedSymbolically";
  case Verdict::TrendsToZeroNumerically:
    return "TrendsToZeroNumerically";
  case Verdict::Violated:
    return "Violated";
  }
  return "Violated";
}

// ---------------------------------------------------------------------------
// Numeric trace tests

namespace {

using Quantity = std::function<double(long)>;

struct Outcome {
  bool ok = false;
  std::optional<long> first_violation;
  std::string note;
};

std::vector<std::pair<long, double>> sample_trace(const Quantity& q, long horizon) {
  std::vector<std::pair<long, double>> out;
  long last = -1;
  for (long n = 0; n <= std::min(horizon, 9L); ++n) {
    out.emplace_back(n, q(n));
    last = n;
  }
  if (horizon > 9) {
    const double lo = std::log(10.0);
    const double hi = std::log(static_cast<double>(horizon));
    constexpr int kPoints = 90;
    for (int k = 0; k <= kPoints; ++k) {
      const long n = static_cast<long>(std::llround(std::exp(lo + (hi - lo) * k / kPoints)));
      if (n <= last || n > horizon) continue;
      out.emplace_back(n, q(n));
      last = n;
    }
  }
  return out;
}

// Monotone nonincreasing over the last decade with a negative log-log slope.
Outcome trends_to_zero(const Quantity& q, long horizon) {
  const long start = std::max(1L, horizon / 10);
  const double first = q(start);
  double prev = first;
  bool all_zero = first == 0.0;
  for (long n = start + 1; n <= horizon; ++n) {
    const double v = q(n);
    if (!std::isfinite(v)) return {false, n, "non-finite value"};
    if (v != 0.0) all_zero = false;
    if (v > prev * (1.0 + 1e-6) + 1e-300) {
      return {false, n, "not monotone over the last decade"};
    }
    prev = v;
  }
  if (all_zero || prev == 0.0) return {true, std::nullopt, "identically zero tail"};
  const double slope = std::log(prev / first) / std::log(static_cast<double>(horizon) / start);
  std::ostringstream note;
  note << "last-decade log-log slope " << slope;
  if (slope <= -1e-3) return {true, std::nullopt, note.str()};
  return {false, horizon, note.str() + " (no decay)"};
}

Outcome bounded_by(const Quantity& q, double bound, long horizon) {
  for (long n = 0; n <= horizon; ++n) {
    const double v = q(n);
    if (!(v <= bound)) {
      std::ostringstream note;
      note << "value " << v << " exceeds bound " << bound;
      return {false, n, note.str()};
    }
  }
  return {true, std::nullopt, "bound holds over the horizon"};
}

// sum a_n = inf judged from n a_n not decaying over the last decade.
Outcome series_diverges(const Quantity& a, long horizon) {
  const long start = std::max(1L, horizon / 10);
  const double head = static_cast<double>(start) * a(start);
  const double tail = static_cast<double>(horizon) * a(horizon);
  if (!(head > 0.0)) return {false, start, "series terms vanish"};
  const double ratio = tail / head;
  std::ostringstream note;
  note << "n*a_n ratio over last decade " << ratio;
  if (ratio >= 0.9) return {true, std::nullopt, note.str()};
  return {false, horizon, note.str() + " (terms decay faster than 1/n)"};
}

ScheduleReport make_report(std::string condition, long horizon, const Quantity& q) {
  ScheduleReport r;
  r.condition = std::move(condition);
  r.horizon = horizon;
  r.trace = sample_trace(q, horizon);
  return r;
}

void apply_numeric(ScheduleReport& r, const Outcome& o) {
  r.verdict = o.ok ? Verdict::TrendsToZeroNumerically : Verdict::Violated;
  r.first_violation = o.first_violation;
  r.note = o.note;
}

void apply_symbolic(ScheduleReport& r, bool holds, std::string note,
                    std::optional<long> violation = 0) {
  r.verdict = holds ? Verdict::SatisfiedSymbolically : Verdict::Violated;
  r.first_violation = holds ? std::nullopt : violation;
  r.note = std::move(note);
}

Outcome both(const Outcome& a, const Outcome& b) {
  if (!a.ok) return a;
  if (!b.ok) return b;
  return {true, std::nullopt, a.note + "; " + b.note};
}

long effective_horizon(long horizon, std::initializer_list<const Schedule*> schedules) {
  long h = horizon;
  for (const Schedule* s : schedules) {
    if (auto last = s->last_index()) h = std::min(h, *last - 1);
  }
  if (h < 1) throw ContractViolation("schedule tables too short for validation");
  return h;
}

// Exponents of h_X(tau) ~ tau^s and phi^-1(u) ~ u^(1/e) for small arguments.
double smoothness_power(const Space& space) {
  return space.exponent() >= 2.0 ? 1.0 : space.exponent() - 1.0;
}
double phi_inverse_power(const Space& space) {
  return space.exponent() >= 2.0 ? space.exponent() : 2.0;
}

std::string exponent_note(const char* what, double e) {
  std::ostringstream s;
  s << what << " ~ (n+1)^" << e;
  return s.str();
}

} // namespace

// ---------------------------------------------------------------------------
// Validators

std::vector<ScheduleReport> validate_implicit(const Space& space, const Schedule& alpha,
                                              const Schedule& gamma, double radius, long horizon,
                                              ValidationMode mode) {
  if (!(radius > 0.0)) throw ContractViolation("radius R must be > 0");
  if (horizon < 100) throw ContractViolation("validation horizon must be >= 100");
  const long n_max = effective_horizon(horizon, {&alpha, &gamma});
  const bool symbolic =
      mode == ValidationMode::Auto && alpha.is_power_law() && gamma.is_power_law();
  const double ka = alpha.exponent();
  const double kg = gamma.exponent();
  const double r1 = 1.5 * radius * radius;

  std::vector<ScheduleReport> out;

  {
    Quantity q = [&](long n) { return std::max(alpha.value(n), 1.0 / gamma.value(n)); };
    auto r = make_report("i) alpha_n -> 0, gamma_n -> inf", n_max, q);
    if (symbolic) {
      apply_symbolic(r, ka > 0.0 && kg > 0.0,
                     exponent_note("alpha_n", -ka) + ", " + exponent_note("gamma_n", kg));
    } else {
      apply_numeric(r, both(trends_to_zero([&](long n) { return alpha.value(n); }, n_max),
                            trends_to_zero([&](long n) { return 1.0 / gamma.value(n); }, n_max)));
    }
    out.push_back(std::move(r));
  }
  {
    Quantity q = [&](long n) {
      const double a = alpha.value(n);
      return gamma.value(n) * std::abs(alpha.value(n + 1) - a) / (a * a);
    };
    auto r = make_report("ii) gamma_n |alpha_{n+1}-alpha_n| / alpha_n^2 -> 0, sum alpha_n/gamma_n = inf",
                         n_max, q);
    if (symbolic) {
      const bool ratio_ok = ka == 0.0 || ka + kg < 1.0;
      const bool series_ok = ka + kg <= 1.0;
      apply_symbolic(r, ratio_ok && series_ok,
                     exponent_note("increment ratio", ka + kg - 1.0) + ", " +
                         exponent_note("alpha_n/gamma_n", -(ka + kg)));
    } else {
      apply_numeric(r, both(trends_to_zero(q, n_max),
                            series_diverges([&](long n) { return alpha.value(n) / gamma.value(n); },
                                            n_max)));
    }
    out.push_back(std::move(r));
  }
  {
    Quantity q = [&](long n) {
      const double a = alpha.value(n);
      const double tau = 1.0 / gamma.value(n);
      return space.smoothness_ratio_bound(tau) * space.phi_inverse_function(radius, r1 * a) / a;
    };
    auto r = make_report("iii) h_X(tau_n) phi_R^-1(R1 alpha_n) / alpha_n -> 0", n_max, q);
    if (symbolic) {
      const double e = -kg * smoothness_power(space) + ka * (1.0 - 1.0 / phi_inverse_power(space));
      apply_symbolic(r, e < 0.0, exponent_note("coupling quantity", e));
    } else {
      apply_numeric(r, trends_to_zero(q, n_max));
    }
    r.note += "; uses modulus upper bounds (sufficient); assumes phi(s,t)/t coercive in t";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScheduleReport> validate_explicit(const Space& space, const Schedule& alpha,
                                              const Schedule& gamma, double d, long horizon,
                                              ValidationMode mode) {
  if (!(d > 0.0 && d < 1.0)) throw ContractViolation("d must lie in (0, 1)");
  if (horizon < 100) throw ContractViolation("validation horizon must be >= 100");
  const long n_max = effective_horizon(horizon, {&alpha, &gamma});
  const bool symbolic =
      mode == ValidationMode::Auto && alpha.is_power_law() && gamma.is_power_law();
  const double ka = alpha.exponent();
  const double kg = gamma.exponent();
  const double sh = smoothness_power(space);

  auto tau = [&](long n) { return 1.0 / gamma.value(n); };
  auto smooth_ratio = [&](long n) {
    const double t = tau(n);
    return space.modulus_smoothness_bound(t) / (t * alpha.value(n));
  };

  std::vector<ScheduleReport> out;
  {
    Quantity q = [&](long n) {
      // Folds alpha_n <= 1 and gamma_n >= 1 into the tau_n <= d check.
      return std::max({tau(n) / d, alpha.value(n), 1.0 / gamma.value(n)});
    };
    auto r = make_report("tau_n <= d (with alpha_n <= 1, gamma_n >= 1)", n_max, q);
    const Outcome o = bounded_by(q, 1.0, n_max);
    if (symbolic) {
      apply_symbolic(r, o.ok, "power laws attain their extremes at n = 0", o.first_violation);
    } else {
      apply_numeric(r, o);
    }
    out.push_back(std::move(r));
  }
  {
    Quantity q = smooth_ratio;
    auto r = make_report("rho_X(tau_n) / (tau_n alpha_n) <= d^2", n_max, q);
    const Outcome o = bounded_by(q, d * d, n_max);
    if (symbolic) {
      const double e = -kg * sh + ka;
      const bool holds = o.ok && e <= 0.0;
      apply_symbolic(r, holds, exponent_note("ratio", e) + "; " + o.note,
                     o.ok ? std::optional<long>(n_max) : o.first_violation);
    } else {
      apply_numeric(r, o);
    }
    out.push_back(std::move(r));
  }
  {
    Quantity q = [&](long n) { return alpha.value(n) * tau(n); };
    auto r = make_report("sum alpha_n tau_n = inf", n_max, q);
    if (symbolic) {
      apply_symbolic(r, ka + kg <= 1.0, exponent_note("alpha_n tau_n", -(ka + kg)));
    } else {
      apply_numeric(r, series_diverges(q, n_max));
    }
    out.push_back(std::move(r));
  }
  {
    Quantity q = [&](long n) { return tau(n) / alpha.value(n); };
    auto r = make_report("tau_n / alpha_n -> 0", n_max, q);
    if (symbolic) {
      apply_symbolic(r, kg > ka, exponent_note("tau_n/alpha_n", ka - kg));
    } else {
      apply_numeric(r, trends_to_zero(q, n_max));
    }
    out.push_back(std::move(r));
  }
  {
    Quantity q = [&](long n) {
      const double a = alpha.value(n);
      return std::abs(a - alpha.value(n + 1)) / (tau(n) * a * a);
    };
    auto r = make_report("|alpha_n - alpha_{n+1}| / (tau_n alpha_n^2) -> 0", n_max, q);
    if (symbolic) {
      apply_symbolic(r, ka == 0.0 || ka + kg < 1.0, exponent_note("increment ratio", ka + kg - 1.0));
    } else {
      apply_numeric(r, trends_to_zero(q, n_max));
    }
    out.push_back(std::move(r));
  }
  {
    Quantity q = smooth_ratio;
    auto r = make_report("rho_X(tau_n) / (tau_n alpha_n) -> 0", n_max, q);
    if (symbolic) {
      const double e = -kg * sh + ka;
      apply_symbolic(r, e < 0.0, exponent_note("ratio", e));
    } else {
      apply_numeric(r, trends_to_zero(q, n_max));
    }
    r.note += "; uses modulus upper bounds (sufficient)";
    out.push_back(std::move(r));
  }
  return out;
}

ScheduleReport validate_newton(const Schedule& alpha, long horizon, ValidationMode mode) {
  if (horizon < 2) throw ContractViolation("validation horizon must be >= 2");
  const long n_max = effective_horizon(horizon, {&alpha});
  Quantity ratio = [&](long n) { return alpha.value(n) / alpha.value(n + 1); };
  auto r = make_report("1 <= alpha_n/alpha_{n+1} <= rho, alpha_n -> 0", n_max, ratio);

  double rho = 1.0;
  for (long n = 0; n < n_max; ++n) {
    const double v = ratio(n);
    if (v < 1.0) {
      r.verdict = Verdict::Violated;
      r.first_violation = n;
      r.note = "alpha_n increases at this index";
      return r;
    }
    rho = std::max(rho, v);
  }
  if (mode == ValidationMode::Auto && alpha.is_power_law()) {
    const double k = alpha.exponent();
    r.certified_rho = std::pow(2.0, k);
    apply_symbolic(r, k > 0.0, "rho = 2^k attained at n = 0");
  } else {
    r.certified_rho = rho;
    apply_numeric(r, trends_to_zero([&](long n) { return alpha.value(n); }, n_max));
  }
  return r;
}

ScheduleReport validate_noisy_coupling(const Schedule& alpha, const Schedule& h,
                                       const Schedule& delta, long horizon, ValidationMode mode) {
  if (horizon < 100) throw ContractViolation("validation horizon must be >= 100");
  const long n_max = effective_horizon(horizon, {&alpha, &h, &delta});
  Quantity q = [&](long n) { return (h.value(n) + delta.value(n)) / alpha.value(n); };
  auto r = make_report("(h_n + delta_n) / alpha_n -> 0", n_max, q);
  const bool symbolic = mode == ValidationMode::Auto && alpha.is_power_law() &&
                        h.is_power_law() && delta.is_power_law();
  if (symbolic) {
    double e = -std::numeric_limits<double>::infinity();
    if (h.coefficient() > 0.0) e = std::max(e, -h.exponent());
    if (delta.coefficient() > 0.0) e = std::max(e, -delta.exponent());
    if (std::isinf(e)) {
      apply_symbolic(r, true, "noise identically zero");
    } else {
      e += alpha.exponent();
      apply_symbolic(r, e < 0.0, exponent_note("noise ratio", e));
    }
  } else {
    apply_numeric(r, trends_to_zero(q, n_max));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Presets

std::vector<std::string> preset_names() {
  return {"hilbert", "lp-large-p", "lp-small-p"};
}

SchedulePair preset(const std::string& name, const Space& space, std::optional<double> k) {
  double k_max = 0.5;
  if (name == "hilbert") {
    if (space.exponent() != 2.0) {
      throw ContractViolation("preset hilbert requires a Hilbert space");
    }
  } else if (name == "lp-large-p") {
    if (space.is_hilbert() || space.exponent() < 2.0) {
      throw ContractViolation("preset lp-large-p requires l^p with p >= 2");
    }
  } else if (name == "lp-small-p") {
    if (space.is_hilbert() || space.exponent() >= 2.0) {
      throw ContractViolation("preset lp-small-p requires l^p with 1 < p < 2");
    }
    k_max = std::min(0.5, space.exponent() - 1.0);
  } else {
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw ContractViolation("unknown schedule preset '" + name + "'; available: " + list);
  }
  const double kk = k ? *k : 0.5 * k_max;
  if (!(kk > 0.0 && kk < k_max)) {
    std::ostringstream msg;
    msg << "preset " << name << " needs 0 < k < " << k_max << ", got " << kk;
    throw ContractViolation(msg.str());
  }
  return {Schedule::power_law(ScheduleRole::Alpha, 1.0, kk),
          Schedule::power_law(ScheduleRole::Gamma, 1.0, 0.5)};
}

} // namespace pirm
