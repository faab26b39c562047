// Serial reference against the OpenMP batch paths: clustering, mining and
// per destination-day planning.

#include <benchmark/benchmark.h>

#include "loadcons/datagen.hpp"
#include "loadcons/pipeline.hpp"

using namespace loadcons;

namespace {

struct Fixture {
  datagen::Generated data;
  datagen::Split split;
  std::vector<cluster::EventPoint> points;
  pipeline::Tactical tactical;
  std::vector<pipeline::DayInstance> days;

  Fixture() {
    datagen::GenConfig gen;
    gen.days = 126;
    data = datagen::generate(gen);
    split = datagen::split_train_test(data.network.loads(), 3);
    pipeline::PipelineConfig cfg;
    points = cluster::build_event_points(pipeline::partial_loads(split.train, cfg.partial_threshold), data.network)
                 .points;
    tactical = pipeline::run_clustering(data.network, split.train, cfg, "train");
    pipeline::run_mining(tactical, data.network, cfg);
    days = pipeline::build_days(split.test, tactical, data.tiers, data.network, cfg,
                                pipeline::Provenance::of("test", split.test));
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_ClusterSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(cluster::st_dbscan(f.points, {}));
}

void BM_ClusterParallel(benchmark::State& state) {
  const auto& f = fixture();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cluster::st_dbscan_parallel(f.points, {}, threads));
}

void BM_Mine(benchmark::State& state) {
  const auto& f = fixture();
  const auto ctx = mining::network_time_context(f.data.network);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mining::mine_groups(f.tactical.transactions, mining::MinSupport::count(5), ctx, {},
                                                 threads));
  }
}

void BM_PlanDays(benchmark::State& state) {
  const auto& f = fixture();
  pipeline::PipelineConfig cfg;
  cfg.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::plan_days(f.days, cfg));
}

}  // namespace

BENCHMARK(BM_ClusterSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClusterParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Mine)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PlanDays)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
