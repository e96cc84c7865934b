#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "housim/rng.hpp"
#include "housim/stats.hpp"

using namespace housim;

TEST(RunningStats, MatchesTwoPassFormulas) {
  const std::vector<double> xs{3.0, 1.5, 4.0, 1.0, 5.5, 9.0, 2.5};
  RunningStats st;
  for (double x : xs) st.add(x);
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(st.mean(), mean, 1e-14);
  EXPECT_NEAR(st.variance(), ss / (xs.size() - 1), 1e-13);
  EXPECT_NEAR(st.std_error(), std::sqrt(ss / (xs.size() - 1) / xs.size()), 1e-14);
  EXPECT_EQ(st.estimate().n, xs.size());
}

TEST(RunningStats, MergeEqualsSequential) {
  RandomStream s(3, StreamPurpose::sampler);
  RunningStats all;
  RunningStats a;
  RunningStats b;
  for (int i = 0; i < 1000; ++i) {
    const double x = s.uniform(-5, 5);
    all.add(x);
    (i < 337 ? a : b).add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.count(), all.count());
  EXPECT_NEAR(a.mean(), all.mean(), 1e-13);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-12);
}

TEST(RunningStats, SingleSampleHasZeroError) {
  RunningStats st;
  st.add(2.0);
  EXPECT_EQ(st.std_error(), 0.0);
}

TEST(Stats, PairwiseSum) {
  std::vector<double> v(1001, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 100.1, 1e-12);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(Stats, KsStatisticHandComputed) {
  // D+ = 1/3 - 0.1 and D- = 0.9 - 2/3 tie
  const double d = ks_statistic({0.5, 0.1, 0.9}, [](double x) { return x; });
  EXPECT_NEAR(d, 1.0 / 3.0 - 0.1, 1e-12);
}

TEST(Stats, KsCriticalValue) {
  EXPECT_NEAR(ks_critical_value(100, 0.01), 0.1628, 2e-4);
  EXPECT_NEAR(ks_critical_value(100, 0.05), 0.1358, 2e-4);
}
