#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "labelforge/quality.hpp"

namespace labelforge {

struct ConflictRecord {
  std::int64_t label_feature_id = 0;
  std::int64_t conflicting_feature_id = 0;
  FeatureKind conflicting_kind = FeatureKind::point;
  Point2D r;  // a point where the feature enters the box
  Point2D b;  // box corner nearest to r
  std::size_t label_index = 0;
  std::size_t feature_index = 0;
};

struct SlideConfig {
  // Safety margin added to every move. Defaults to epsilon_height_factor x label height.
  std::optional<double> epsilon;
  double epsilon_height_factor = 0.05;
  std::array<double, 4> point_directions_deg{45.0, 135.0, 225.0, 315.0};
  std::size_t max_attempts = 8;  // fixed candidates tried before directional moves
  bool single_kind_only = false;  // only move labels whose conflicts are all one feature kind

  void validate() const;
  double epsilon_for(const LabelSpec& label) const;
};

struct SlideReport {
  std::size_t initial_conflicts = 0;  // labels with mu1 > 0 before sliding
  std::size_t eliminated = 0;         // now conflict-free
  std::size_t better = 0;             // moved to a less severe position, still conflicting
  double score_before = 0.0;          // rho2
  double score_after = 0.0;
  double fitness_before = 0.0;
  double fitness_after = 0.0;

  friend bool operator==(const SlideReport&, const SlideReport&) = default;
};

enum class SlideOutcome { eliminated, better };

struct SlideMove {
  CandidatePosition position;
  SlideOutcome outcome = SlideOutcome::eliminated;
  bool directional = false;  // displaced along a direction rather than switched to a fixed candidate
  double direction = 0.0;    // radians, for directional moves
  double distance = 0.0;     // d_mve used, for directional moves
};

std::vector<ConflictRecord> detect_conflicts(const Placement& placement, std::span<const Feature> features);
std::vector<ConflictRecord> detect_label_conflicts(const Placement& placement, std::span<const Feature> features,
                                                   std::size_t label);

// ||r - b|| + epsilon. Throws ConfigError when epsilon <= 0.
double move_distance(Point2D r, Point2D b, double epsilon);

struct SlideContext {
  const LabelingProblem& problem;
  const FeatureIndex& index;
  const SlideConfig& config;
  ScoringOptions options;
};

std::optional<SlideMove> slide_point_label(std::size_t label, std::span<const ConflictRecord> conflicts,
                                           const Placement& placement, const SlideContext& ctx);
std::optional<SlideMove> slide_line_area_label(std::size_t label, std::span<const ConflictRecord> conflicts,
                                               const Placement& placement, const SlideContext& ctx);

struct SlideResult {
  Placement placement;
  SlideReport report;
};

// One sweep over conflicting labels, point conflicts first.
SlideResult apply_sliding(const Placement& placement, const LabelingProblem& problem, const SlideConfig& config,
                          const QualityWeights& weights, const ScoringOptions& options = {});

}  // namespace labelforge
