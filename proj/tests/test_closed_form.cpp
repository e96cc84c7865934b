#include <gtest/gtest.h>

#include <cmath>

#include "housim/closed_form.hpp"
#include "housim/oracle.hpp"

using namespace housim::closed_form;

namespace {

// The unsimplified series form, in long double. It overflows for large
// lambda*T, which is why the library evaluates a rearranged form.
long double literal_series(long double T, long double lambda, long double mu, long double lo, long double hi,
                           long double r) {
  const long double f = 1.0L - (1.0L - std::exp(-mu * T)) / (mu * T);
  const long double g = (1.0L - f) * std::exp(-r * T) * std::exp(-lambda * T);
  const long double a = lambda * T;
  const long double ef = std::exp(a * f);
  return -g * (hi - lo) / ((1.0L - f) * (1.0L - f)) *
             (f * ef - (ef - 1.0L) / a - ef + (std::exp(a) - 1.0L) / a) +
         hi * g * (std::exp(a) - ef) / (1.0L - f);
}

MarketParams with_lambda(double lambda) {
  MarketParams m;
  m.lambda = lambda;
  return m;
}

}  // namespace

// Reference values from a 40-digit evaluation of the order-statistic integral
// e^{-rT}(lo (1 - e^{-m}) + int_lo^hi (1 - e^{-m (hi - y)/(hi - lo)}) dy).
TEST(ClosedForm, AuxiliaryFrozenValues) {
  EXPECT_NEAR(auxiliary_payoff(1.0, default_market()), 90.097266202011149, 1e-10);
  EXPECT_NEAR(auxiliary_payoff(0.25, with_lambda(12)), 130.78476963079717, 1e-10);
  EXPECT_NEAR(auxiliary_payoff(5.0, with_lambda(1)), 16.674923602562045, 1e-10);
}

TEST(ClosedForm, AuxiliaryMatchesLiteralSeries) {
  for (double T : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    for (double lambda : {0.5, 1.0, 5.0, 12.0}) {
      const auto m = with_lambda(lambda);
      const double lit = static_cast<double>(literal_series(T, lambda, m.mu, m.p_min, m.p_max, m.r));
      EXPECT_NEAR(auxiliary_payoff(T, m), lit, 1e-9 * std::max(1.0, lit)) << "T=" << T << " lambda=" << lambda;
    }
  }
}

TEST(ClosedForm, AuxiliaryFiniteWhereLiteralOverflows) {
  const auto m = with_lambda(400.0);
  const double u = auxiliary_payoff(50.0, m);
  EXPECT_TRUE(std::isfinite(u));
  EXPECT_NEAR(u, 1.3391669660682366, 1e-12);
}

TEST(ClosedForm, SmallTimeSeriesBranch) {
  // mu*T = 5e-6 sits below the series threshold.
  EXPECT_NEAR(auxiliary_payoff(1e-6, default_market()), 7.4999638334775370e-4, 1e-15);
  MarketParams m = with_lambda(2.0);
  EXPECT_NEAR(thinned_payoff(1e-7, m, 140.0), 2.0399993544001534e-5, 1e-17);
  EXPECT_NEAR(withdrawal_fraction(1e-6, 5.0), 2.4999958333385417e-6, 1e-20);
  EXPECT_NEAR(withdrawal_fraction(1.0, 5.0), 0.80134758939981709, 1e-15);
}

TEST(ClosedForm, ZeroHorizonAndZeroIntensity) {
  EXPECT_EQ(auxiliary_payoff(0.0, default_market()), 0.0);
  EXPECT_EQ(listed_payoff(0.0, default_market(), 140, 180), 0.0);
  EXPECT_EQ(auxiliary_payoff(2.0, with_lambda(0.0)), 0.0);
}

TEST(ClosedForm, RejectsBadInputs) {
  EXPECT_THROW(auxiliary_payoff(-1.0, default_market()), std::invalid_argument);
  EXPECT_THROW(auxiliary_payoff(std::nan(""), default_market()), std::invalid_argument);
  EXPECT_THROW(listed_payoff(1.0, default_market(), 190, 180), std::invalid_argument);
  EXPECT_THROW(thinned_payoff(1.0, default_market(), 90), std::invalid_argument);
  MarketParams bad;
  bad.p_min = 200;
  bad.p_max = 100;
  EXPECT_THROW(auxiliary_payoff(1.0, bad), std::invalid_argument);
}

TEST(ClosedForm, ThinnedFrozenAndReductions) {
  EXPECT_NEAR(thinned_payoff(1.0, default_market(), 140.0), 70.264284421740534, 1e-10);
  for (double T : {0.5, 2.0}) {
    EXPECT_NEAR(thinned_payoff(T, default_market(), 100.0), auxiliary_payoff(T, default_market()), 1e-12);
    EXPECT_NEAR(listed_payoff(T, default_market(), 140.0, 200.0), thinned_payoff(T, default_market(), 140.0), 1e-12);
    EXPECT_NEAR(listed_payoff_exact(T, default_market(), 140.0, 200.0), thinned_payoff(T, default_market(), 140.0),
                1e-12);
  }
}

TEST(ClosedForm, ListedFrozenValues) {
  EXPECT_NEAR(listed_payoff(1.0, default_market(), 140, 180), 126.79081702598315, 1e-10);
  EXPECT_NEAR(listed_payoff_exact(1.0, default_market(), 140, 180), 132.83771513501854, 1e-10);
  EXPECT_NEAR(listed_payoff(2.5, default_market(), 140, 180), 161.94908819567693, 1e-10);
  EXPECT_NEAR(listed_payoff_exact(2.5, default_market(), 140, 180), 165.08532102228268, 1e-10);
  EXPECT_NEAR(expected_utility(1.0, default_market(), default_policy()), 114.72507550846038, 1e-10);
}

TEST(ClosedForm, PrintedSitsBelowExact) {
  for (double T : {0.25, 0.5, 1.0, 2.0, 5.0}) {
    for (double lambda : {1.0, 5.0, 12.0}) {
      const auto m = with_lambda(lambda);
      EXPECT_LT(listed_payoff(T, m, 140, 180), listed_payoff_exact(T, m, 140, 180));
    }
  }
}

TEST(ClosedForm, Asymptote) {
  EXPECT_NEAR(asymptotic_listed_payoff(default_market(), 180.0), 190.0 / 1.1, 1e-12);
  const double a = asymptotic_listed_payoff(default_market(), 180.0);
  EXPECT_LT(std::abs(listed_payoff(50.0, default_market(), 140, 180) - a) / a, 1e-6);
  EXPECT_LT(std::abs(listed_payoff_exact(50.0, default_market(), 140, 180) - a) / a, 1e-6);
}

TEST(ClosedForm, ListedMonotoneWithoutImpatience) {
  SellerPolicy p = default_policy();
  p.gamma = 0.0;
  for (auto formula : {ListedFormula::printed, ListedFormula::exact}) {
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double v = expected_utility(0.05 * i, default_market(), p, formula);
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
  }
}

TEST(ClosedForm, NoListCurveRisesThenFalls) {
  double prev = 0.0;
  int turns = 0;
  bool rising = true;
  for (int i = 1; i <= 400; ++i) {
    const double v = thinned_payoff(0.025 * i, default_market(), 140.0);
    if (rising && v < prev) {
      rising = false;
      ++turns;
    } else if (!rising && v > prev) {
      ++turns;
    }
    prev = v;
  }
  EXPECT_EQ(turns, 1);
}

TEST(ClosedForm, MonteCarloBracketsAuxiliary) {
  const auto est = housim::oracle::mc_auxiliary_payoff(1.0, default_market(), 200000, 17);
  EXPECT_NEAR(auxiliary_payoff(1.0, default_market()), est.mean, 3.0 * est.std_error);
}
