#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <string>

#include "labelforge/pipeline.hpp"

using namespace labelforge;

namespace {

const Dataset& dataset(const std::string& name) {
  static std::map<std::string, Dataset> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, read_geojson(std::string(LABELFORGE_FIXTURE_DIR) + "/" + name)).first;
  return it->second;
}

const LabelingProblem& dense_problem() {
  static const LabelingProblem p = [] {
    const auto& ds = dataset("dense320.geojson");
    return make_problem(ds.features, partition_by_shortcut(ds.features, {}));
  }();
  return p;
}

void BM_BoxesIntersect(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<LabelBox> boxes;
  for (int i = 0; i < 1024; ++i) boxes.push_back(make_box({u(rng), u(rng)}, 1 + u(rng) / 2, 1 + u(rng) / 5, u(rng)));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(boxes_intersect(boxes[i & 1023], boxes[(i * 7 + 3) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_BoxesIntersect);

void BM_CandidateGeneration(benchmark::State& state) {
  const auto& ds = dataset("washington71.geojson");
  for (auto _ : state) benchmark::DoNotOptimize(partition_by_shortcut(ds.features, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.features.size()));
}
BENCHMARK(BM_CandidateGeneration)->Unit(benchmark::kMillisecond);

void BM_FitnessEvaluation(benchmark::State& state) {
  const FitnessModel model(dense_problem(), {});
  std::mt19937_64 rng(2);
  std::vector<Gene> genes(model.gene_count());
  for (auto& g : genes) g = static_cast<Gene>(rng() % kCandidatesPerFeature);
  for (auto _ : state) benchmark::DoNotOptimize(model.fitness(genes));
}
BENCHMARK(BM_FitnessEvaluation);

void BM_TotalScore(benchmark::State& state) {
  const auto& p = dense_problem();
  std::vector<Gene> genes(p.full.size(), 0);
  const Placement placement = placement_for(p, genes);
  for (auto _ : state) benchmark::DoNotOptimize(total_score(placement, p.features, {}));
}
BENCHMARK(BM_TotalScore)->Unit(benchmark::kMicrosecond);

void BM_Generation(benchmark::State& state) {
  const FitnessModel model(dense_problem(), {});
  OptimizerConfig cfg;
  Optimizer opt(model, cfg);
  for (auto _ : state) opt.step();
}
BENCHMARK(BM_Generation)->Unit(benchmark::kMicrosecond);

void BM_Sliding(benchmark::State& state) {
  const auto& p = dense_problem();
  const Placement placement = placement_for(p, std::vector<Gene>(p.full.size(), 0));
  for (auto _ : state) benchmark::DoNotOptimize(apply_sliding(placement, p, {}, {}));
}
BENCHMARK(BM_Sliding)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
