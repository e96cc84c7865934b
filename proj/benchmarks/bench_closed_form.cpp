#include <benchmark/benchmark.h>

#include "housim/closed_form.hpp"
#include "housim/owt.hpp"

using namespace housim;

static void BM_AuxiliaryPayoff(benchmark::State& state) {
  const auto market = closed_form::default_market();
  double T = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(closed_form::auxiliary_payoff(T, market));
    T = T < 10.0 ? T + 0.001 : 0.5;
  }
}
BENCHMARK(BM_AuxiliaryPayoff);

static void BM_ListedPayoff(benchmark::State& state) {
  const auto market = closed_form::default_market();
  const auto formula = static_cast<closed_form::ListedFormula>(state.range(0));
  double T = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(closed_form::listed_payoff(T, market, 140.0, 180.0, formula));
    T = T < 10.0 ? T + 0.001 : 0.5;
  }
}
BENCHMARK(BM_ListedPayoff)->Arg(0)->Arg(1);

static void BM_OptimalWaitingTime(benchmark::State& state) {
  const auto market = closed_form::default_market();
  const auto policy = closed_form::default_policy();
  for (auto _ : state) {
    const auto result = owt::optimal_waiting_time(
        [&](double T) { return closed_form::expected_utility(T, market, policy); });
    benchmark::DoNotOptimize(result.t_star);
  }
}
BENCHMARK(BM_OptimalWaitingTime)->Unit(benchmark::kMicrosecond);

static void BM_DefaultSweep(benchmark::State& state) {
  owt::SweepSpec spec;
  spec.threads = 1;
  spec.x = {owt::SweepParameter::lambda, 1.0, 10.0, 10};
  spec.y = {owt::SweepParameter::r, 0.02, 0.3, 15};
  for (auto _ : state) benchmark::DoNotOptimize(owt::sweep_owt(spec).t_star.size());
}
BENCHMARK(BM_DefaultSweep)->Unit(benchmark::kMillisecond);
