#include "labelforge/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "labelforge/errors.hpp"

namespace labelforge {

void PipelineConfig::validate() const {
  layers.validate();
  optimizer.validate();
  weights.validate();
  sliding.validate();
  if (workers == 0) throw InvalidWorkerCount("worker count must be at least 1");
  if (exchange_interval == 0) throw ConfigError("exchange interval must be at least 1");
}

void PipelineConfig::apply_strict_mode() {
  scoring.line_priority = false;
  sliding.single_kind_only = true;
}

PipelineResult run_pipeline(const Dataset& dataset, const PipelineConfig& cfg, const IslandOptions& options) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const WorkerPlan plan =
      partition_features(dataset.features.size(), cfg.workers, cfg.optimizer.rng_seed, cfg.exchange_interval);

  PipelineResult out;
  GatherResult gathered = scatter_generate_gather(dataset.features, cfg.layers, plan);
  out.generation_timing = std::move(gathered.timing);
  out.problem = make_problem(dataset.features, std::move(gathered.partition));

  const FitnessModel model(out.problem, cfg.weights, cfg.scoring);
  out.islands = optimize_islands(model, cfg.optimizer, plan, options);
  out.optimized = placement_for(out.problem, out.islands.best.genes);
  out.sliding = apply_sliding(out.optimized, out.problem, cfg.sliding, cfg.weights, cfg.scoring);

  PlacementReport& r = out.report;
  r = make_report(out.problem, out.sliding.placement);
  r.input = dataset.source_path;
  r.before = total_score(out.optimized, out.problem.features, cfg.weights, cfg.scoring);
  r.after = total_score(out.sliding.placement, out.problem.features, cfg.weights, cfg.scoring);
  r.sliding = out.sliding.report;
  r.lowest_score = model.fitness(std::vector<Gene>(model.gene_count(), 0));
  for (const auto& t : out.islands.traces) r.iterations = std::max(r.iterations, t.best_per_generation.size());
  r.workers = cfg.workers;
  r.seed = cfg.optimizer.rng_seed;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cfg.record_wall_time) r.wall_seconds = out.wall_seconds;
  quantize(r);
  return out;
}

}  // namespace labelforge
