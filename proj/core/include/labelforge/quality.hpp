#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "labelforge/candidates.hpp"
#include "labelforge/spatial_index.hpp"

namespace labelforge {

// Per-term weights of the fitness function.
struct QualityWeights {
  double w1 = 10.0;  // label-label
  double w2 = 5.0;   // label-feature
  double w3 = 1.0;   // ambiguity
  double w4 = 1.0;   // position priority

  void validate() const;
};

struct ScoringOptions {
  // Lines add their orientation priority to S4. Off in strict mode.
  bool line_priority = true;
};

inline constexpr double kLabelLabelPenalty = 9.0;
inline constexpr int kPointConflict = 99;
inline constexpr int kLineAreaConflict = 1;

struct ScoreBreakdown {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;
  double rho2 = 0.0;
  double fitness = 0.0;
  std::size_t ll_conflict_count = 0;
  std::size_t lf_conflict_count = 0;

  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

// One chosen position per feature, aligned with the feature list.
struct Placement {
  std::vector<CandidatePosition> labels;
  std::vector<bool> optimized;  // true for features with 24 candidates (the Q set)
};

struct LabelLabelScore {
  double s1 = 0.0;
  std::size_t pair_count = 0;      // pairs among optimized labels (drives s1)
  std::size_t conflict_count = 0;  // all overlapping pairs, frozen labels included
};

struct LabelFeatureScore {
  double s2 = 0.0;
  std::size_t conflict_count = 0;
};

LabelLabelScore score_label_label(const Placement& placement);

// mu1 of one box against every feature except `own`: 99 for a point hit,
// else 1 for a line or polygon boundary, else 0.
int label_feature_penalty(const LabelBox& box, std::size_t own, std::span<const Feature> features);

// Read-only bucket index over feature geometries for repeated label-feature queries.
class FeatureIndex {
 public:
  explicit FeatureIndex(std::span<const Feature> features);

  int penalty(const LabelBox& box, std::size_t own) const;
  // Indices of features (other than `own`) the box conflicts with, ascending.
  std::vector<std::size_t> conflicts(const LabelBox& box, std::size_t own) const;

  std::span<const Feature> features() const { return features_; }

 private:
  std::span<const Feature> features_;
  GridIndex grid_;
};

LabelFeatureScore score_label_feature(const Placement& placement, std::span<const Feature> features);
double score_ambiguity(const Placement& placement);
double score_priority(const Placement& placement, std::span<const Feature> features, const ScoringOptions& options = {});

ScoreBreakdown total_score(const Placement& placement, std::span<const Feature> features, const QualityWeights& weights,
                           const ScoringOptions& options = {});

double weighted(const ScoreBreakdown& s, const QualityWeights& w);

using Gene = std::uint8_t;

// Features plus their candidate sets, aligned by index.
struct LabelingProblem {
  std::vector<Feature> features;
  std::vector<CandidateSet> sets;
  std::vector<std::size_t> full;  // feature indices of the Q optimized features, ascending
};

LabelingProblem make_problem(std::vector<Feature> features, ShortcutPartition partition);

// Genes index into the sorted candidate sets of `problem.full`.
Placement placement_for(const LabelingProblem& problem, std::span<const Gene> genes);

// Precomputed chromosome scorer. Unary terms (mu1, mu2, priority) are tabulated per
// candidate and pairwise label overlaps per neighbouring feature pair, so one
// evaluation costs O(Q + overlapping neighbour pairs). Immutable after construction.
class FitnessModel {
 public:
  FitnessModel(const LabelingProblem& problem, QualityWeights weights, ScoringOptions options = {});

  std::size_t gene_count() const { return unary_.size(); }
  double fitness(std::span<const Gene> genes) const;
  ScoreBreakdown breakdown(std::span<const Gene> genes) const;

  const LabelingProblem& problem() const { return *problem_; }
  const QualityWeights& weights() const { return weights_; }
  const ScoringOptions& options() const { return options_; }

 private:
  struct Unary {
    std::array<std::uint8_t, kCandidatesPerFeature> mu1{};
    std::array<double, kCandidatesPerFeature> mu2{};
    std::array<double, kCandidatesPerFeature> priority{};
    std::array<double, kCandidatesPerFeature> cost{};
    std::array<std::uint16_t, kCandidatesPerFeature> frozen_overlaps{};
  };
  struct Edge {
    std::uint32_t other = 0;  // index into the gene vector, always > owner
    std::array<std::uint32_t, kCandidatesPerFeature> rows{};  // bit b of rows[a]: candidate a vs other's b overlap
  };

  const LabelingProblem* problem_;
  QualityWeights weights_;
  ScoringOptions options_;
  double frozen_cost_ = 0.0;
  std::vector<Unary> unary_;
  std::vector<std::vector<Edge>> edges_;
  ScoreBreakdown frozen_{};  // contribution of shortcut labels (no S1 by definition)
  std::size_t frozen_ll_pairs_ = 0;
};

}  // namespace labelforge
