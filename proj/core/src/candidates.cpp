#include "labelforge/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "labelforge/errors.hpp"
#include "labelforge/spatial_index.hpp"

namespace labelforge {
namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kHalfPi = std::numbers::pi / 2.0;

// Anchor visiting order: from the middle of the feature outward.
constexpr std::array<std::size_t, kPositionsPerLayer> kAnchorOrder{3, 4, 2, 5, 1, 6, 0, 7};

// Exact unit directions for bearings k * 45 degrees.
Point2D octant_direction(int k) {
  const double s = std::numbers::sqrt2 / 2.0;
  static const std::array<Point2D, 8> dirs{Point2D{1, 0},  Point2D{s, s},   Point2D{0, 1},  Point2D{-s, s},
                                           Point2D{-1, 0}, Point2D{-s, -s}, Point2D{0, -1}, Point2D{s, -s}};
  return dirs[static_cast<std::size_t>(k)];
}

int sign_of(double v) { return (v > 1e-12) - (v < -1e-12); }

std::int64_t score_key(double score) { return std::llround(score * 1e9); }

void sort_positions(std::vector<CandidatePosition>& positions) {
  std::stable_sort(positions.begin(), positions.end(), [](const CandidatePosition& a, const CandidatePosition& b) {
    const auto ka = score_key(a.base_score);
    const auto kb = score_key(b.base_score);
    if (ka != kb) return ka < kb;
    if (a.layer != b.layer) return a.layer < b.layer;
    return a.slot < b.slot;
  });
}

double half_extent_along(const LabelBox& box, Point2D n) {
  const Point2D u = unit_vector(box.angle);
  const Point2D v{-u.y, u.x};
  return std::abs(dot(u, n)) * box.length / 2.0 + std::abs(dot(v, n)) * box.height / 2.0;
}

void finish(CandidatePosition& c, const Feature& f, const LayerConfig& layers) {
  c.ambiguity = ambiguity(c.layer, layers.radii_for(f.label));
  c.base_score = base_score(c, f, layers);
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::point: return "point";
    case FeatureKind::line: return "line";
    case FeatureKind::area: return "area";
  }
  return "unknown";
}

std::string_view to_string(Orientation orientation) {
  switch (orientation) {
    case Orientation::horizontal: return "horizontal";
    case Orientation::along: return "along";
    case Orientation::vertical: return "vertical";
  }
  return "unknown";
}

double LabelSpec::length() const {
  std::size_t count = 0;
  for (unsigned char ch : text) {
    if ((ch & 0xC0) != 0x80) ++count;
  }
  return char_width * static_cast<double>(count);
}

void validate_feature(const Feature& feature) {
  if (feature.label.text.empty()) throw MissingLabel("feature " + std::to_string(feature.id) + " has an empty label");
  if (!(feature.label.char_width > 0.0) || !(feature.label.height > 0.0)) {
    throw InvalidGeometry("feature " + std::to_string(feature.id) + " has a non-positive label size");
  }
  const bool matches = (feature.kind == FeatureKind::point && std::holds_alternative<Point2D>(feature.geometry)) ||
                       (feature.kind == FeatureKind::line && std::holds_alternative<Polyline>(feature.geometry)) ||
                       (feature.kind == FeatureKind::area && std::holds_alternative<Polygon>(feature.geometry));
  if (!matches) throw InvalidGeometry("feature " + std::to_string(feature.id) + " geometry does not match its kind");
}

std::array<double, 3> LayerConfig::radii_for(const LabelSpec& label) const {
  if (absolute) return *absolute;
  return {height_factors[0] * label.height, height_factors[1] * label.height, height_factors[2] * label.height};
}

void LayerConfig::validate() const {
  const auto& r = absolute ? *absolute : height_factors;
  if (!(r[0] > 0.0 && r[0] < r[1] && r[1] < r[2])) {
    throw ConfigError("layer radii must satisfy 0 < R1 < R2 < R3");
  }
}

double point_priority(double beta) {
  const double b = normalize_angle(beta);
  const int quadrant = std::clamp(static_cast<int>(std::floor((b + 1e-9) / kHalfPi)), 0, 3);
  static constexpr std::array<double, 4> table{0.25, 0.5, 0.75, 1.0};
  return table[static_cast<std::size_t>(quadrant == 4 ? 0 : quadrant)];
}

double area_priority(Orientation orientation) {
  switch (orientation) {
    case Orientation::horizontal: return 0.25;
    case Orientation::along: return 0.5;
    case Orientation::vertical: return 0.75;
  }
  return 0.75;
}

double line_priority(Orientation orientation) {
  switch (orientation) {
    case Orientation::along: return 0.25;
    case Orientation::horizontal: return 0.5;
    case Orientation::vertical: return 0.75;
  }
  return 0.75;
}

double ambiguity(int layer, const std::array<double, 3>& radii) {
  if (layer <= 1) return 0.0;
  if (layer >= 3) return 1.0;
  return (radii[1] - radii[0]) / (radii[2] - radii[0]);
}

double base_score(const CandidatePosition& c, const Feature& f, const LayerConfig& layers) {
  const double mu2 = ambiguity(c.layer, layers.radii_for(f.label));
  switch (f.kind) {
    case FeatureKind::point: return mu2 + point_priority(c.beta.value_or(0.0));
    case FeatureKind::area: return mu2 + area_priority(c.orientation);
    case FeatureKind::line: return mu2 + line_priority(c.orientation);
  }
  return mu2;
}

CandidateSet point_candidates(const Feature& f, const LayerConfig& layers) {
  const Point2D p = std::get<Point2D>(f.geometry);
  const auto radii = layers.radii_for(f.label);
  const double length = f.label.length();
  const double height = f.label.height;

  CandidateSet set{f.id, {}};
  set.positions.reserve(kCandidatesPerFeature);
  for (int layer = 1; layer <= 3; ++layer) {
    for (int k = 0; k < static_cast<int>(kPositionsPerLayer); ++k) {
      const Point2D dir = octant_direction(k);
      const Point2D nearest = p + dir * radii[static_cast<std::size_t>(layer - 1)];
      // Axial bearings touch an edge midpoint, diagonal bearings a corner.
      const Point2D push{sign_of(dir.x) * length / 2.0, sign_of(dir.y) * height / 2.0};
      CandidatePosition c;
      c.box = make_box(nearest + push, length, height, 0.0);
      c.layer = layer;
      c.beta = k * kQuarterPi;
      c.orientation = Orientation::horizontal;
      c.priority = point_priority(*c.beta);
      c.slot = (layer - 1) * static_cast<int>(kPositionsPerLayer) + k;
      finish(c, f, layers);
      set.positions.push_back(c);
    }
  }
  sort_positions(set.positions);
  return set;
}

CandidateSet polygon_candidates(const Feature& f, const LayerConfig& layers, const Skeleton& skeleton) {
  const Polygon& poly = std::get<Polygon>(f.geometry);
  const auto radii = layers.radii_for(f.label);
  const double length = f.label.length();
  const double height = f.label.height;
  const auto& spine = skeleton.spine.vertices;
  // Layer 2 sits on the offset lines; layer 3 farther out by R3/R2.
  const std::array<double, 3> offset_scale{0.0, 1.0, radii[2] / radii[1]};

  CandidateSet set{f.id, {}};
  set.positions.reserve(kCandidatesPerFeature);
  for (int layer = 1; layer <= 3; ++layer) {
    for (std::size_t order = 0; order < kPositionsPerLayer; ++order) {
      const std::size_t i = kAnchorOrder[order] * spine.size() / kPositionsPerLayer;
      const Point2D anchor = spine[i];
      const bool above = i % 2 == 0;
      const Point2D offset = (above ? skeleton.above.vertices[i] : skeleton.below.vertices[i]) - anchor;
      const Point2D center = anchor + offset * offset_scale[static_cast<std::size_t>(layer - 1)];
      const double direction = polyline_direction_at(skeleton.spine, i);

      CandidatePosition c;
      c.layer = layer;
      c.slot = (layer - 1) * static_cast<int>(kPositionsPerLayer) + static_cast<int>(order);
      c.feature_angle = normalize_angle(direction);
      c.box = make_box(center, length, height, 0.0);
      c.orientation = Orientation::horizontal;
      if (box_feature_intersect(c.box, poly)) {
        c.box = make_box(center, length, height, readable_angle(direction));
        c.orientation = Orientation::along;
        if (box_feature_intersect(c.box, poly)) {
          c.box = make_box(center, length, height, kHalfPi);
          c.orientation = Orientation::vertical;
        }
      }
      c.priority = area_priority(c.orientation);
      finish(c, f, layers);
      set.positions.push_back(c);
    }
  }
  sort_positions(set.positions);
  return set;
}

CandidateSet polyline_candidates(const Feature& f, const LayerConfig& layers) {
  const Polyline& line = std::get<Polyline>(f.geometry);
  const auto radii = layers.radii_for(f.label);
  const double length = f.label.length();
  const double height = f.label.height;
  const auto& v = line.vertices;

  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < v.size(); ++i) cumulative.push_back(cumulative.back() + distance(v[i - 1], v[i]));
  const double total = cumulative.back();

  struct Anchor {
    Point2D at;
    double direction;
  };
  std::array<Anchor, kPositionsPerLayer> anchors{};
  for (std::size_t k = 0; k < kPositionsPerLayer; ++k) {
    const double target = total * (static_cast<double>(k) + 0.5) / static_cast<double>(kPositionsPerLayer);
    std::size_t seg = 1;
    while (seg + 1 < v.size() && cumulative[seg] < target) ++seg;
    const double span = cumulative[seg] - cumulative[seg - 1];
    const double t = span > 0.0 ? (target - cumulative[seg - 1]) / span : 0.0;
    const Point2D d = v[seg] - v[seg - 1];
    anchors[k] = Anchor{v[seg - 1] + d * t, std::atan2(d.y, d.x)};
  }

  CandidateSet set{f.id, {}};
  set.positions.reserve(kCandidatesPerFeature);
  for (int layer = 1; layer <= 3; ++layer) {
    const double gap = radii[static_cast<std::size_t>(layer - 1)];
    for (std::size_t order = 0; order < kPositionsPerLayer; ++order) {
      const std::size_t i = kAnchorOrder[order];
      const Anchor& a = anchors[i];
      const double side = i % 2 == 0 ? 1.0 : -1.0;
      const Point2D normal = Point2D{-std::sin(a.direction), std::cos(a.direction)} * side;

      const std::array<std::pair<Orientation, double>, 3> options{
          std::pair{Orientation::along, readable_angle(a.direction)}, std::pair{Orientation::horizontal, 0.0},
          std::pair{Orientation::vertical, kHalfPi}};
      CandidatePosition c;
      c.layer = layer;
      c.slot = (layer - 1) * static_cast<int>(kPositionsPerLayer) + static_cast<int>(order);
      c.feature_angle = normalize_angle(a.direction);
      for (const auto& [orientation, angle] : options) {
        LabelBox probe = make_box(a.at, length, height, angle);
        probe.center = a.at + normal * (gap + half_extent_along(probe, normal));
        c.box = probe;
        c.orientation = orientation;
        if (!box_feature_intersect(probe, line)) break;
      }
      c.priority = line_priority(c.orientation);
      finish(c, f, layers);
      set.positions.push_back(c);
    }
  }
  sort_positions(set.positions);
  return set;
}

CandidateSet generate_candidates(const Feature& feature, const LayerConfig& layers) {
  validate_feature(feature);
  switch (feature.kind) {
    case FeatureKind::point: return point_candidates(feature, layers);
    case FeatureKind::line: return polyline_candidates(feature, layers);
    case FeatureKind::area: {
      const Skeleton skeleton = polygon_skeleton(std::get<Polygon>(feature.geometry), feature.label.height);
      return polygon_candidates(feature, layers, skeleton);
    }
  }
  return {};
}

ShortcutPartition classify_shortcuts(std::span<const Feature> features, std::vector<CandidateSet> generated) {
  std::vector<Aabb> feature_bounds;
  std::vector<Aabb> best_bounds;
  feature_bounds.reserve(features.size());
  best_bounds.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    feature_bounds.push_back(bounds(features[i].geometry));
    best_bounds.push_back(bounds(generated[i].positions.front().box));
  }
  const GridIndex feature_index(feature_bounds);
  const GridIndex best_index(best_bounds);

  auto isolated = [&](std::size_t i) {
    const Feature& f = features[i];
    if (f.kind != FeatureKind::area) return false;
    // The polygon itself must not touch any point or line feature.
    for (std::size_t j : feature_index.query(feature_bounds[i])) {
      if (j == i || features[j].kind == FeatureKind::area) continue;
      if (geometries_touch(f.geometry, features[j].geometry)) return false;
    }
    const LabelBox& best = generated[i].positions.front().box;
    for (std::size_t j : feature_index.query(best_bounds[i])) {
      if (j != i && box_feature_intersect(best, features[j].geometry)) return false;
    }
    for (std::size_t j : best_index.query(best_bounds[i])) {
      if (j != i && boxes_intersect(best, generated[j].positions.front().box)) return false;
    }
    return true;
  };

  std::vector<bool> frozen(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) frozen[i] = isolated(i);

  ShortcutPartition out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (frozen[i]) {
      generated[i].positions.resize(1);
      out.shortcut.push_back(std::move(generated[i]));
    } else {
      out.full.push_back(std::move(generated[i]));
    }
  }
  return out;
}

ShortcutPartition partition_by_shortcut(std::span<const Feature> features, const LayerConfig& layers) {
  std::vector<CandidateSet> generated;
  generated.reserve(features.size());
  for (const Feature& f : features) generated.push_back(generate_candidates(f, layers));
  return classify_shortcuts(features, std::move(generated));
}

}  // namespace labelforge
