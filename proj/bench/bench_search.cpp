// Serial vs OpenMP kernels: equilibrium search batches and policy enumeration.

#include <benchmark/benchmark.h>

#include <vector>

#include "ptgame/best_response.hpp"
#include "ptgame/equilibrium_search.hpp"
#include "ptgame/marginals.hpp"
#include "ptgame/smartgrid.hpp"

using namespace ptgame;

namespace {

const ValidatedGame& simulation_game() {
  static const ValidatedGame g = validate_game(smartgrid::build_simulation_game());
  return g;
}

// Explicit (consumption, demand) actions: 6 actions per prosumer.
const ValidatedGame& demand_game() {
  static const ValidatedGame g = [] {
    auto sim = smartgrid::simulation_setup();
    sim.encoding = smartgrid::ActionEncoding::consumption_demand;
    return validate_game(smartgrid::build_prosumer_game(sim));
  }();
  return g;
}

void search_simulation(benchmark::State& state, bool parallel) {
  const auto& g = simulation_game();
  const std::vector<int> x{0, 0, 0};
  SearchConfig cfg;
  cfg.mode = SearchConfig::Mode::sampled;
  cfg.rng_seed = static_cast<std::uint64_t>(state.range(0));
  cfg.epsilon = 0.01;
  cfg.parallel = parallel;
  for (auto _ : state) {
    auto cert = search(g, x, cfg);
    benchmark::DoNotOptimize(cert.players);
    state.counters["candidates"] = static_cast<double>(cert.candidates_examined);
  }
}

void BM_SearchSerial(benchmark::State& state) { search_simulation(state, false); }
void BM_SearchParallel(benchmark::State& state) { search_simulation(state, true); }
BENCHMARK(BM_SearchSerial)->Arg(1)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchParallel)->Arg(1)->Arg(7)->Unit(benchmark::kMillisecond);

StageRewardTable demand_rewards(int m) {
  const auto& g = demand_game();
  MarkovStrategyProfile profile;
  for (std::size_t i = 0; i < g.player_count(); ++i)
    profile.push_back(MarkovStrategy::uniform(i, m, g.player(i).state_count, g.player(i).action_count));
  const auto rho = profile_marginals(g, profile, std::vector<int>{0, 0, 0}, m);
  return induced_stage_rewards(g, 0, rho, m);
}

void BM_EnumerateSerial(benchmark::State& state) {
  const auto r = demand_rewards(2);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_dm_policies_serial(demand_game(), 0, r, 0, 2).value);
}

void BM_EnumerateParallel(benchmark::State& state) {
  const auto r = demand_rewards(2);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_dm_policies(demand_game(), 0, r, 0, 2).value);
}

void BM_BackwardInduction(benchmark::State& state) {
  const auto r = demand_rewards(2);
  for (auto _ : state) benchmark::DoNotOptimize(backward_induction(demand_game(), 0, r, 0, 2).value);
}

BENCHMARK(BM_EnumerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackwardInduction)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
