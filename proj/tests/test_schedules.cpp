#include "errors.hpp"
#include "schedules.hpp"
#include "space.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pirm;

namespace {

Schedule alpha_law(double k, double c0 = 1.0) { return Schedule::power_law(ScheduleRole::Alpha, c0, k); }
Schedule gamma_law(double k, double c0 = 1.0) { return Schedule::power_law(ScheduleRole::Gamma, c0, k); }
Schedule noise_law(double k, double c0 = 1.0) { return Schedule::power_law(ScheduleRole::Noise, c0, k); }

bool all_ok(const std::vector<ScheduleReport>& rs) {
  for (const auto& r : rs) {
    if (!r.ok()) return false;
  }
  return true;
}

} // namespace

TEST(Schedules, Values) {
  EXPECT_NEAR(alpha_law(0.25).value(15), 0.5, 1e-15);
  EXPECT_NEAR(gamma_law(0.5).value(3), 2.0, 1e-15);
  EXPECT_EQ(alpha_law(0.7).value(0), 1.0);
  EXPECT_EQ(gamma_law(0.7).value(0), 1.0);
  EXPECT_THROW(alpha_law(0.5).value(-1), ContractViolation);

  const Schedule t = Schedule::table(ScheduleRole::Alpha, {1.0, 0.5, 0.25});
  EXPECT_EQ(t.value(2), 0.25);
  EXPECT_THROW(t.value(3), ContractViolation);
  EXPECT_EQ(t.last_index(), 2);
  EXPECT_THROW(Schedule::table(ScheduleRole::Alpha, {1.0, -1.0}), ContractViolation);
  EXPECT_THROW(Schedule::power_law(ScheduleRole::Alpha, 0.0, 1.0), ContractViolation);
}

TEST(Schedules, ImplicitExamples) {
  const auto h = validate_implicit(Space::hilbert(4), alpha_law(0.25), gamma_law(0.5), 1.0, 1000);
  ASSERT_EQ(h.size(), 3u);
  for (const auto& r : h) EXPECT_EQ(r.verdict, Verdict::SatisfiedSymbolically) << r.condition;

  const auto l3 = validate_implicit(Space::lp(3, 4), alpha_law(0.4), gamma_law(0.5), 1.0, 1000);
  EXPECT_TRUE(all_ok(l3));

  const auto flat = validate_implicit(Space::hilbert(4), Schedule::constant(ScheduleRole::Alpha, 0.5),
                                      gamma_law(0.5), 1.0, 1000);
  EXPECT_EQ(flat[0].verdict, Verdict::Violated);
}

TEST(Schedules, ImplicitRejectsBadArguments) {
  EXPECT_THROW(validate_implicit(Space::hilbert(2), alpha_law(0.25), gamma_law(0.5), 0.0, 1000),
               ContractViolation);
  EXPECT_THROW(validate_implicit(Space::hilbert(2), alpha_law(0.25), gamma_law(0.5), 1.0, 50),
               ContractViolation);
}

TEST(Schedules, ImplicitCouplingFailsForFastAlpha) {
  // l^p, p >= 2: condition iii) needs gamma_n alpha_n^{(p-1)/p} -> inf.
  const auto r = validate_implicit(Space::lp(3, 4), alpha_law(0.9), gamma_law(0.5), 1.0, 1000);
  EXPECT_EQ(r[2].verdict, Verdict::Violated);
}

TEST(Schedules, ExplicitExamples) {
  // tau_n = (n+1)^{-1/2} / 4 keeps tau_n <= d from n = 0.
  const auto ok = validate_explicit(Space::hilbert(4), alpha_law(0.25), gamma_law(0.5, 4.0), 0.5, 1000);
  ASSERT_EQ(ok.size(), 6u);
  for (const auto& r : ok) EXPECT_TRUE(r.ok()) << r.condition << ": " << r.note;

  const auto same = validate_explicit(Space::hilbert(4), alpha_law(1.0), gamma_law(1.0, 4.0), 0.5, 1000);
  EXPECT_EQ(same[2].verdict, Verdict::Violated);
}

TEST(Schedules, ExplicitFlagsLargeInitialStep) {
  const auto r = validate_explicit(Space::hilbert(4), alpha_law(0.25), gamma_law(0.5), 0.5, 1000);
  EXPECT_EQ(r[0].verdict, Verdict::Violated);
  EXPECT_EQ(r[0].first_violation, 0);
  for (std::size_t i = 2; i < r.size(); ++i) EXPECT_TRUE(r[i].ok()) << r[i].condition;
}

TEST(Schedules, NewtonRatio) {
  const auto half = validate_newton(alpha_law(0.5));
  EXPECT_EQ(half.verdict, Verdict::SatisfiedSymbolically);
  ASSERT_TRUE(half.certified_rho);
  EXPECT_NEAR(*half.certified_rho, std::sqrt(2.0), 1e-15);

  const auto inc = validate_newton(Schedule::table(ScheduleRole::Alpha, {0.1, 0.2, 0.3, 0.4}));
  EXPECT_EQ(inc.verdict, Verdict::Violated);
  EXPECT_EQ(inc.first_violation, 0);

  const auto one = validate_newton(alpha_law(1.0), 10);
  EXPECT_NEAR(*one.certified_rho, 2.0, 1e-15);
  const auto num = validate_newton(alpha_law(1.0), 10, ValidationMode::Numeric);
  EXPECT_NEAR(*num.certified_rho, 2.0, 1e-15);
}

TEST(Schedules, NoisyCoupling) {
  EXPECT_TRUE(validate_noisy_coupling(alpha_law(0.25), noise_law(1.0), noise_law(1.0)).ok());
  EXPECT_TRUE(validate_noisy_coupling(alpha_law(0.25), noise_law(1.0), noise_law(1.0), 100000,
                                      ValidationMode::Numeric)
                  .ok());
  EXPECT_FALSE(validate_noisy_coupling(alpha_law(0.25), noise_law(0.25), noise_law(0.25, 1e-3)).ok());
  EXPECT_FALSE(validate_noisy_coupling(alpha_law(0.25), noise_law(0.25), noise_law(0.25, 1e-3), 100000,
                                       ValidationMode::Numeric)
                   .ok());
  EXPECT_FALSE(validate_noisy_coupling(alpha_law(0.25), Schedule::constant(ScheduleRole::Noise, 0.5),
                                       Schedule::constant(ScheduleRole::Noise, 0.5))
                   .ok());

  const Schedule zero = Schedule::constant(ScheduleRole::Noise, 0.0);
  EXPECT_EQ(validate_noisy_coupling(alpha_law(0.25), zero, zero).verdict, Verdict::SatisfiedSymbolically);
  EXPECT_TRUE(validate_noisy_coupling(alpha_law(0.25), zero, zero, 1000, ValidationMode::Numeric).ok());
}

TEST(Schedules, SymbolicAndNumericAgreeOnPresets) {
  struct Case {
    std::string name;
    Space space;
    double k;
  };
  const std::vector<Case> cases = {
      {"hilbert", Space::hilbert(3), 0.25},
      {"hilbert", Space::hilbert(3), 0.45},
      {"lp-large-p", Space::lp(3, 3), 0.3},
      {"lp-large-p", Space::lp(4, 3), 0.1},
      {"lp-small-p", Space::lp(1.5, 3), 0.3},
      {"lp-small-p", Space::lp(1.2, 3), 0.1},
  };
  for (const auto& c : cases) {
    const SchedulePair s = preset(c.name, c.space, c.k);
    const auto sym = validate_implicit(c.space, s.alpha, s.gamma, 1.0, 1000000);
    const auto num = validate_implicit(c.space, s.alpha, s.gamma, 1.0, 1000000, ValidationMode::Numeric);
    for (std::size_t i = 0; i < sym.size(); ++i) {
      EXPECT_EQ(sym[i].verdict, Verdict::SatisfiedSymbolically) << c.name << " " << sym[i].condition;
      EXPECT_EQ(num[i].verdict, Verdict::TrendsToZeroNumerically) << c.name << " " << num[i].condition;
    }
  }
}

TEST(Schedules, PresetsPassTheirValidators) {
  EXPECT_TRUE(all_ok(validate_implicit(Space::hilbert(3), preset("hilbert", Space::hilbert(3)).alpha,
                                       preset("hilbert", Space::hilbert(3)).gamma, 1.0)));
  for (double p : {2.5, 3.0, 6.0}) {
    const SchedulePair s = preset("lp-large-p", Space::lp(p, 3));
    EXPECT_TRUE(all_ok(validate_implicit(Space::lp(p, 3), s.alpha, s.gamma, 1.0)));
  }
  for (double p : {1.1, 1.5, 1.9}) {
    const SchedulePair s = preset("lp-small-p", Space::lp(p, 3));
    EXPECT_TRUE(all_ok(validate_implicit(Space::lp(p, 3), s.alpha, s.gamma, 1.0)));
  }
}

TEST(Schedules, PresetErrors) {
  try {
    preset("example9", Space::hilbert(2));
    FAIL();
  } catch (const ContractViolation& e) {
    const std::string msg = e.what();
    for (const auto& n : preset_names()) EXPECT_NE(msg.find(n), std::string::npos);
  }
  EXPECT_THROW(preset("hilbert", Space::hilbert(2), 0.6), ContractViolation);
  EXPECT_THROW(preset("lp-large-p", Space::lp(1.5, 2)), ContractViolation);
  EXPECT_THROW(preset("lp-small-p", Space::lp(1.2, 2), 0.3), ContractViolation);
}
