#include <gtest/gtest.h>

#include <cmath>

#include "housim/closed_form.hpp"
#include "housim/owt.hpp"

using namespace housim;
using namespace housim::owt;

namespace {

double dense_argmax(const std::function<double(double)>& f, double t_max, int points) {
  double best_t = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= points; ++i) {
    const double t = t_max * i / points;
    const double v = f(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

TEST(Owt, FindsQuadraticPeak) {
  const auto res = optimal_waiting_time([](double t) { return -(t - 2.5) * (t - 2.5); });
  EXPECT_NEAR(res.t_star, 2.5, kDefaultTol);
  EXPECT_EQ(res.boundary, Boundary::interior);
  EXPECT_TRUE(res.unimodal());
  EXPECT_GT(res.evaluations, kCoarseGridPoints);
}

TEST(Owt, BoundaryFlags) {
  const auto right = optimal_waiting_time([](double t) { return t; }, 10.0);
  EXPECT_EQ(right.boundary, Boundary::right);
  EXPECT_DOUBLE_EQ(right.t_star, 10.0);
  const auto left = optimal_waiting_time([](double t) { return -t; }, 10.0);
  EXPECT_EQ(left.boundary, Boundary::left);
  EXPECT_LE(left.t_star, kDefaultTol);
}

TEST(Owt, FlagsMultimodalObjective) {
  const auto res = optimal_waiting_time([](double t) { return std::sin(3.0 * t); }, 10.0);
  EXPECT_FALSE(res.unimodal());
}

TEST(Owt, RejectsNonFiniteObjective) {
  EXPECT_THROW(optimal_waiting_time([](double t) { return t > 1.0 ? std::nan("") : t; }), std::domain_error);
}

TEST(Owt, TableDefaultsMatchDenseGrid) {
  const auto market = closed_form::default_market();
  const auto policy = closed_form::default_policy();
  for (auto formula : {closed_form::ListedFormula::printed, closed_form::ListedFormula::exact}) {
    auto z = [&](double T) { return closed_form::expected_utility(T, market, policy, formula); };
    const auto res = optimal_waiting_time(z);
    EXPECT_NEAR(res.t_star, dense_argmax(z, 20.0, 200000), 1e-3);
    EXPECT_EQ(res.boundary, Boundary::interior);
    EXPECT_TRUE(res.unimodal());
  }
}

TEST(Owt, InfiniteImpatienceGoesLeft) {
  auto policy = closed_form::default_policy();
  policy.gamma = 1e6;
  const auto market = closed_form::default_market();
  const auto res = optimal_waiting_time([&](double T) { return closed_form::expected_utility(T, market, policy); });
  EXPECT_EQ(res.boundary, Boundary::left);
}

TEST(OwtSweep, ParameterNamesRoundTrip) {
  for (auto p : {SweepParameter::lambda, SweepParameter::mu, SweepParameter::r, SweepParameter::reservation,
                 SweepParameter::list, SweepParameter::gamma, SweepParameter::p_min, SweepParameter::p_max}) {
    EXPECT_EQ(parse_sweep_parameter(to_string(p)), p);
  }
  EXPECT_FALSE(parse_sweep_parameter("rho"));
}

TEST(OwtSweep, AxisGrid) {
  EXPECT_EQ((SweepAxis{SweepParameter::r, 0.1, 0.1, 1}.grid()), std::vector<double>{0.1});
  EXPECT_THROW((SweepAxis{SweepParameter::r, 0.1, 0.2, 1}.grid()), std::invalid_argument);
  EXPECT_THROW((SweepAxis{SweepParameter::r, 0.2, 0.1, 3}.grid()), std::invalid_argument);
  const auto g = SweepAxis{SweepParameter::lambda, 1, 10, 10}.grid();
  ASSERT_EQ(g.size(), 10u);
  EXPECT_DOUBLE_EQ(g.back(), 10.0);
}

TEST(OwtSweep, SmallGridAndInvalidCells) {
  SweepSpec spec;
  spec.x = {SweepParameter::lambda, 2, 4, 2};
  spec.y = {SweepParameter::reservation, 150, 190, 2};
  const auto s = sweep_owt(spec);
  ASSERT_EQ(s.t_star.size(), 4u);
  EXPECT_TRUE(s.at(0, 0).has_value());
  EXPECT_TRUE(s.at(0, 1).has_value());
  EXPECT_FALSE(s.at(1, 0).has_value());  // R above the list price
  EXPECT_FALSE(s.at(1, 1).has_value());
}

TEST(OwtSweep, DeterministicAcrossThreads) {
  SweepSpec spec;
  spec.x = {SweepParameter::lambda, 1, 10, 4};
  spec.y = {SweepParameter::r, 0.02, 0.3, 3};
  spec.threads = 1;
  const auto a = sweep_owt(spec);
  spec.threads = 4;
  const auto b = sweep_owt(spec);
  EXPECT_EQ(a.t_star, b.t_star);
}

TEST(OwtSweep, ExactFormulaDecreasesInRate) {
  SweepSpec spec;
  spec.x = {SweepParameter::lambda, 1, 10, 4};
  spec.y = {SweepParameter::r, 0.02, 0.3, 6};
  const auto s = sweep_owt(spec);
  for (std::size_t ix = 0; ix < s.x.size(); ++ix) {
    for (std::size_t iy = 1; iy < s.y.size(); ++iy) {
      EXPECT_LE(*s.at(iy, ix), *s.at(iy - 1, ix) + 2 * kDefaultTol) << "lambda=" << s.x[ix] << " r=" << s.y[iy];
    }
  }
}

TEST(OwtSweep, PrintedFormulaIncreasesInRate) {
  // The printed above-list discount makes waiting cheaper as r grows.
  SweepSpec spec;
  spec.formula = closed_form::ListedFormula::printed;
  spec.x = {SweepParameter::lambda, 5, 5, 1};
  spec.y = {SweepParameter::r, 0.02, 0.3, 2};
  const auto s = sweep_owt(spec);
  EXPECT_GT(*s.at(1, 0), *s.at(0, 0));
}
