#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "rankvar/bootstrap_infer.hpp"
#include "rankvar/sim_engine.hpp"
#include "rankvar/tail_diagnostics.hpp"
#include "rankvar/tail_models.hpp"

using namespace rankvar;

static void BM_RankExperiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.tail = Exponential{1};
  cfg.n = static_cast<std::size_t>(state.range(0));
  cfg.p = ScaleRule::parse("0.0005*n^2");
  cfg.noise_sd = 3.5;
  cfg.reps = 200;
  cfg.j0_list = {ScaleRule::literal(1), ScaleRule::parse("n^0.35")};
  cfg.modes = {CorrectnessMode::prefix, CorrectnessMode::set};
  cfg.direction = Direction::descending;
  cfg.workers = 1;
  for (auto _ : state) {
    cfg.seed++;
    benchmark::DoNotOptimize(run_rank_experiment(cfg));
  }
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_RankExperiment)->Arg(500)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_RenyiExtremes(benchmark::State& state) {
  const TailModel m(BoundedPower{1});
  RandomStream rng(1);
  const auto p = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_extreme_order_stats(m, p, 50, TailSide::lower, rng));
}
BENCHMARK(BM_RenyiExtremes)->Arg(1000)->Arg(1000000);

static void BM_FullSortExtremes(benchmark::State& state) {
  const TailModel m(BoundedPower{1});
  RandomStream rng(1);
  const auto p = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto v = sample_iid(m, p, rng);
    std::partial_sort(v.begin(), v.begin() + 50, v.end());
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_FullSortExtremes)->Arg(1000)->Arg(100000);

static void BM_BootstrapReplicates(benchmark::State& state) {
  RandomStream rng(2);
  Replicates ds;
  for (int i = 0; i < state.range(0); ++i) {
    ReplicateItem it{std::to_string(i), {}};
    for (int k = 0; k < 20; ++k) it.samples.push_back(0.05 * i + rng.normal());
    ds.items.push_back(std::move(it));
  }
  BootstrapOptions o;
  o.B = 200;
  o.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_rank_intervals(ds, o));
}
BENCHMARK(BM_BootstrapReplicates)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_MannWhitney(benchmark::State& state) {
  RandomStream rng(3);
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal() + 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(mann_whitney(x, y));
}
BENCHMARK(BM_MannWhitney)->Arg(62)->Arg(1000);

static void BM_Hill(benchmark::State& state) {
  RandomStream rng(4);
  const auto v = sample_iid(TailModel(Pareto{4}), 100000, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hill_estimator(v, 1000));
}
BENCHMARK(BM_Hill)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
