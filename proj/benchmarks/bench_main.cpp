#include <benchmark/benchmark.h>

#include "dind/models.hpp"
#include "dind/montecarlo.hpp"
#include "dind/solvers.hpp"

using dind::Probability;
namespace models = dind::models;
namespace mc = dind::mc;
namespace solvers = dind::solvers;

namespace {

void BM_BlockadeLikelihood(benchmark::State& state) {
  const models::BlockadeParams params{Probability(0.43), 10.0, 5e6};
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::blockade_likelihood(params).value());
  }
}
BENCHMARK(BM_BlockadeLikelihood);

void BM_DelayLikelihoodOverTime(benchmark::State& state) {
  models::DelayParams params;
  params.detection_rate = 1.0;
  params.layer_time = 1.0;
  params.layers = 24.0;
  params.attackers = 1000.0;
  params.horizon = 1e5;
  params.speedup = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        models::delay_likelihood_over_time(params).value());
  }
}
BENCHMARK(BM_DelayLikelihoodOverTime);

void BM_UndetectedSuccessExact(benchmark::State& state) {
  const models::CombinedParams params{Probability(0.05), Probability(0.05),
                                      15.0, 1e5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::undetected_success_exact(params).value());
  }
}
BENCHMARK(BM_UndetectedSuccessExact);

void BM_SolveHardness(benchmark::State& state) {
  solvers::SolveRequest request;
  request.model = solvers::SolveModel::blockade;
  request.unknown = "p";
  request.target = 0.001;
  request.fixed = {{"n", 10.0}, {"N", 5.0}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solvers::solve(request));
  }
}
BENCHMARK(BM_SolveHardness);

void BM_SolveIntegerLayers(benchmark::State& state) {
  solvers::SolveRequest request;
  request.model = solvers::SolveModel::combined;
  request.unknown = "n";
  request.target = 0.05;
  request.fixed = {{"p", 0.05}, {"d", 0.05}, {"N_A", 1e5}};
  request.integer_constraint = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solvers::solve(request));
  }
}
BENCHMARK(BM_SolveIntegerLayers);

// Trial throughput; items_processed makes the per-trial cost visible.
void BM_SimBlockadeTrials(benchmark::State& state) {
  const models::BlockadeParams params{Probability(0.43), 10.0, 5.0};
  mc::SimConfig config;
  config.trials = static_cast<std::uint64_t>(state.range(0));
  config.seed = 1;
  config.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc::sim_blockade(params, config).mean);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(config.trials));
}
BENCHMARK(BM_SimBlockadeTrials)->Arg(10000)->Arg(100000);

void BM_SimCombinedTrials(benchmark::State& state) {
  const models::CombinedParams params{Probability(0.05), Probability(0.05),
                                      15.0, 10.0};
  mc::SimConfig config;
  config.trials = static_cast<std::uint64_t>(state.range(0));
  config.seed = 1;
  config.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc::sim_combined(params, config).mean);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(config.trials));
}
BENCHMARK(BM_SimCombinedTrials)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
