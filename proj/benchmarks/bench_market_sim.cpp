#include <benchmark/benchmark.h>

#include "housim/market_sim.hpp"
#include "housim/rng.hpp"
#include "housim/stochastic.hpp"

using namespace housim;

static void BM_SaleAttempt(benchmark::State& state) {
  market_sim::SimulationConfig config;
  const auto path = stochastic::RatePath::constant(0.08, 25.0);
  path_payoff::PathContext ctx{path, 0.0, market_sim::list_schedule(140.0, 200.0, config.zeta),
                               path_payoff::OfferDistribution::uniform(config.p_min, config.p_max),
                               path_payoff::WithdrawalDistribution::exponential(config.mu), 140.0, config.demand};
  RandomStream stream(7, StreamPurpose::sale_attempt);
  for (auto _ : state) benchmark::DoNotOptimize(market_sim::run_sale_attempt(ctx, 0.5, stream).offers.size());
}
BENCHMARK(BM_SaleAttempt)->Unit(benchmark::kMicrosecond);

static void BM_SimulateCir(benchmark::State& state) {
  const stochastic::CirParams cir;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(stochastic::simulate_cir(cir, 10.0, 1.0 / 252.0, ++seed).values().size());
}
BENCHMARK(BM_SimulateCir)->Unit(benchmark::kMicrosecond);

static void BM_Evolution(benchmark::State& state) {
  const market_sim::SimulationConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(market_sim::run_evolution(config, 50.0, 42).events.size());
}
BENCHMARK(BM_Evolution)->Unit(benchmark::kMillisecond);
