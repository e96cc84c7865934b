#include <benchmark/benchmark.h>

#include "housim/market_sim.hpp"
#include "housim/oracle.hpp"
#include "housim/path_payoff.hpp"

using namespace housim;

namespace {

path_payoff::PathContext context() { return oracle::reference_path_context(market_sim::SimulationConfig{}); }

}  // namespace

// Arg: list mode (0 changing, 1 constant, 2 none).
static void BM_ConditionalPayoff(benchmark::State& state) {
  const auto ctx = context();
  const auto mode = static_cast<path_payoff::ListMode>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(path_payoff::conditional_payoff(ctx, 1.0, mode, path_payoff::PayoffFormula::exact));
  }
}
BENCHMARK(BM_ConditionalPayoff)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_ConditionalPayoffNodes(benchmark::State& state) {
  auto ctx = context();
  ctx.nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(path_payoff::conditional_payoff(ctx, 1.0, path_payoff::ListMode::changing,
                                                             path_payoff::PayoffFormula::printed));
  }
}
BENCHMARK(BM_ConditionalPayoffNodes)->Arg(51)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond);

static void BM_OraclePathPayoff(benchmark::State& state) {
  const auto ctx = context();
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::mc_path_payoff(ctx, 1.0, path_payoff::ListMode::changing, 10000, 1, 1).mean);
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_OraclePathPayoff)->Unit(benchmark::kMillisecond);
