#pragma once

// Slow, independent re-implementations used as test oracles. Nothing here calls
// the library's geometry predicates.

#include <array>
#include <vector>

#include "labelforge/quality.hpp"

namespace lf_test {

using labelforge::Point2D;

// Corners by explicit rotation of (+-L/2, +-h/2), counterclockwise from (+L/2, +h/2).
std::array<Point2D, 4> rotated_corners(const labelforge::LabelBox& box);

// Sutherland-Hodgman clip of two convex counterclockwise polygons, then shoelace area.
double convex_overlap_area(const std::vector<Point2D>& subject, const std::vector<Point2D>& clip);
double box_overlap_area(const labelforge::LabelBox& a, const labelforge::LabelBox& b);

// Cyrus-Beck clip of a segment against the box polygon; true when a piece of
// positive length (or a strictly interior endpoint) remains.
bool segment_hits_box(const labelforge::LabelBox& box, Point2D a, Point2D b);
bool point_strictly_in_box(const labelforge::LabelBox& box, Point2D p);

struct ReferenceScore {
  std::size_t optimized_pairs = 0;
  std::size_t all_pairs = 0;
  std::vector<int> mu1;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0, rho2 = 0, fitness = 0;
  std::size_t lf_count = 0;
};

ReferenceScore reference_score(const labelforge::Placement& placement, const std::vector<labelforge::Feature>& features,
                               const labelforge::LayerConfig& layers, const labelforge::QualityWeights& weights,
                               bool line_priority = true);

}  // namespace lf_test
