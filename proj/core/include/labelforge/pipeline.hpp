#pragma once

#include <cstddef>

#include "labelforge/io.hpp"
#include "labelforge/parallel.hpp"
#include "labelforge/sliding.hpp"

namespace labelforge {

struct PipelineConfig {
  LayerConfig layers;
  OptimizerConfig optimizer;
  QualityWeights weights;
  ScoringOptions scoring;
  SlideConfig sliding;
  std::size_t workers = 1;
  std::size_t exchange_interval = 500;
  bool record_wall_time = false;  // wall time makes reports differ run to run

  void validate() const;
  // Drops line priority from S4 and restricts sliding to single-kind conflicts.
  void apply_strict_mode();
};

struct PipelineResult {
  LabelingProblem problem;
  Placement optimized;  // before sliding
  SlideResult sliding;
  IslandResult islands;
  TaskTiming generation_timing;
  PlacementReport report;
  double wall_seconds = 0.0;
};

// Candidate generation, island optimization, sliding and report assembly.
PipelineResult run_pipeline(const Dataset& dataset, const PipelineConfig& cfg, const IslandOptions& options = {});

}  // namespace labelforge
