#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelforge/quality.hpp"
#include "labelforge/sliding.hpp"

namespace labelforge {

struct ReadOptions {
  double default_char_width = 1.0;
  double default_label_height = 1.0;
};

struct Dataset {
  std::vector<Feature> features;  // ids are 0..n-1 in file order
  std::string source_path;
  Aabb bounds;
  std::vector<std::string> warnings;  // lossy conversions, e.g. dropped holes
};

// GeoJSON FeatureCollection -> features. Multi-part lines and polygons become one
// feature per part, named "<id>#<part>".
Dataset parse_geojson(std::string_view text, const ReadOptions& options = {}, std::string source_path = {});
Dataset read_geojson(const std::filesystem::path& path, const ReadOptions& options = {});

struct ReportRow {
  std::int64_t id = 0;
  std::string name;
  FeatureKind kind = FeatureKind::point;
  LabelBox box;
  int layer = 1;
  int mu1 = 0;
  double mu2 = 0.0;
  double priority = 0.0;
  bool shortcut = false;
  std::size_t label_conflicts = 0;  // other boxes this one overlaps

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct PlacementReport {
  std::string schema = "labelforge/1";
  std::string input;
  std::vector<ReportRow> rows;
  ScoreBreakdown before;  // after optimization, before sliding
  ScoreBreakdown after;
  SlideReport sliding;
  double lowest_score = 0.0;  // fitness of the all-best-candidate placement
  std::size_t feature_count = 0;
  std::size_t optimized_count = 0;
  std::size_t shortcut_count = 0;
  std::size_t lf_conflict_count = 0;
  std::size_t ll_conflict_count = 0;
  std::size_t iterations = 0;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::optional<double> wall_seconds;

  friend bool operator==(const PlacementReport&, const PlacementReport&) = default;
};

PlacementReport make_report(const LabelingProblem& problem, const Placement& placement);

// Rounds every real field to the 6 decimals the JSON form keeps, so a report
// compares equal to its own round trip.
void quantize(PlacementReport& report);

// Canonical text: sorted keys, two-space indent, reals with exactly 6 decimals.
std::string report_to_json(const PlacementReport& report);
PlacementReport report_from_json(std::string_view text);
void write_report(const PlacementReport& report, const std::filesystem::path& path);
PlacementReport read_report(const std::filesystem::path& path);

// Canonical form of any JSON document (used for dumped configs too).
std::string canonical_json_text(std::string_view json_text);

std::string svg_document(std::span<const Feature> features, const Placement& placement);
void render_svg(const Dataset& dataset, const Placement& placement, const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace labelforge
