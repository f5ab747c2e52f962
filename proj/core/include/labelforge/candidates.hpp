#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelforge/geometry.hpp"

namespace labelforge {

inline constexpr std::size_t kCandidatesPerFeature = 24;
inline constexpr std::size_t kPositionsPerLayer = 8;

enum class FeatureKind { point, line, area };

std::string_view to_string(FeatureKind kind);

struct LabelSpec {
  std::string text;
  double char_width = 1.0;
  double height = 1.0;

  // Box length: char_width times the number of characters (UTF-8 code points).
  double length() const;
};

struct Feature {
  std::int64_t id = 0;
  FeatureKind kind = FeatureKind::point;
  Geometry geometry;
  LabelSpec label;
  std::string name;  // source identifier, informational only
};

// Throws InvalidGeometry / ConfigError when the feature breaks its invariants.
void validate_feature(const Feature& feature);

// Three increasing gaps R1 < R2 < R3 between a feature and its label boxes.
// By default they scale with each label's height; `absolute` pins them in map units.
struct LayerConfig {
  std::array<double, 3> height_factors{0.3, 0.9, 1.5};
  std::optional<std::array<double, 3>> absolute;

  std::array<double, 3> radii_for(const LabelSpec& label) const;
  void validate() const;
};

enum class Orientation { horizontal, along, vertical };

std::string_view to_string(Orientation orientation);

struct CandidatePosition {
  LabelBox box;
  int layer = 1;                // 1..3
  std::optional<double> beta;   // point candidates: bearing of the nearest box point
  Orientation orientation = Orientation::horizontal;
  double ambiguity = 0.0;       // normalized layer distance in [0, 1]
  double priority = 0.0;        // position preference of this slot
  double base_score = 0.0;      // ambiguity + priority
  int slot = 0;                 // enumeration order, used as the final tie-break
  double feature_angle = 0.0;   // local line / skeleton direction (0 for points)
};

struct CandidateSet {
  std::int64_t feature_id = 0;
  std::vector<CandidatePosition> positions;

  bool is_shortcut() const { return positions.size() == 1; }
};

// Priority tables.
double point_priority(double beta);
double area_priority(Orientation orientation);
double line_priority(Orientation orientation);

double ambiguity(int layer, const std::array<double, 3>& radii);

// ambiguity + kind-specific priority.
double base_score(const CandidatePosition& candidate, const Feature& feature, const LayerConfig& layers);

CandidateSet point_candidates(const Feature& feature, const LayerConfig& layers);
CandidateSet polygon_candidates(const Feature& feature, const LayerConfig& layers, const Skeleton& skeleton);
CandidateSet polyline_candidates(const Feature& feature, const LayerConfig& layers);

// Validates the feature, then dispatches on kind; builds the skeleton for area features.
CandidateSet generate_candidates(const Feature& feature, const LayerConfig& layers);

struct ShortcutPartition {
  std::vector<CandidateSet> shortcut;  // single frozen position each
  std::vector<CandidateSet> full;      // 24 positions each; size is Q
};

// Classifies already generated 24-position sets (aligned with `features`).
ShortcutPartition classify_shortcuts(std::span<const Feature> features, std::vector<CandidateSet> generated);

ShortcutPartition partition_by_shortcut(std::span<const Feature> features, const LayerConfig& layers);

}  // namespace labelforge
