#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace labelforge {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
inline Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
inline Point2D operator*(Point2D a, double s) { return {a.x * s, a.y * s}; }
inline Point2D operator*(double s, Point2D a) { return {a.x * s, a.y * s}; }

inline double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2D a) { return std::hypot(a.x, a.y); }
inline double distance(Point2D a, Point2D b) { return norm(a - b); }
inline Point2D unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

struct Polyline {
  std::vector<Point2D> vertices;
};

// Exterior ring only; stored closed (front() == back()).
struct Polygon {
  std::vector<Point2D> ring;
};

using Geometry = std::variant<Point2D, Polyline, Polygon>;

// Oriented label rectangle. `angle` is counterclockwise from +x, kept in [0, 2pi).
struct LabelBox {
  Point2D center;
  double length = 0.0;
  double height = 0.0;
  double angle = 0.0;

  friend bool operator==(const LabelBox&, const LabelBox&) = default;
};

struct Aabb {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool overlaps(const Aabb& o) const {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
  Aabb expanded(double m) const { return {min_x - m, min_y - m, max_x + m, max_y + m}; }
  void extend(const Aabb& o);
  void extend(Point2D p);
};

struct Skeleton {
  Polyline spine;
  Polyline above;
  Polyline below;
  bool horizontal = true;  // spine runs along +x when true, along +y otherwise
};

double normalize_angle(double angle);
// Maps a direction onto the equivalent text angle in (-pi/2, pi/2], normalized.
double readable_angle(double direction);

LabelBox make_box(Point2D center, double length, double height, double angle = 0.0);

// Validating constructors; throw InvalidGeometry.
Polyline make_polyline(std::vector<Point2D> vertices);
Polygon make_polygon(std::vector<Point2D> ring);

// Corners counterclockwise, starting at local (+L/2, +h/2).
std::array<Point2D, 4> label_box_corners(const LabelBox& box);

// Box-local coordinates of p (u along the box length axis, v along its height axis).
Point2D to_box_frame(const LabelBox& box, Point2D p);

// Positive-area overlap of two oriented boxes; edge contact is not an overlap.
bool boxes_intersect(const LabelBox& a, const LabelBox& b);

bool box_contains_point(const LabelBox& box, Point2D p);
bool box_segment_intersect(const LabelBox& box, Point2D a, Point2D b);
// First point of segment ab inside the box interior, if any.
std::optional<Point2D> box_segment_entry(const LabelBox& box, Point2D a, Point2D b);

// Points: strictly inside. Polylines: any segment reaches the interior.
// Polygons: the box crosses (or contains part of) the exterior ring.
bool box_feature_intersect(const LabelBox& box, const Geometry& geometry);

// Representative intersection point between the box and the geometry.
std::optional<Point2D> box_feature_contact(const LabelBox& box, const Geometry& geometry);

Aabb bounds(const LabelBox& box);
Aabb bounds(const Geometry& geometry);
Aabb bounds(std::span<const Point2D> points);

double signed_area(std::span<const Point2D> closed_ring);
double polyline_length(const Polyline& line);
bool segments_intersect(Point2D a, Point2D b, Point2D c, Point2D d);
// Even-odd test; points on the boundary count as inside.
bool point_in_polygon(Point2D p, const Polygon& poly);
bool polygon_is_simple(const Polygon& poly);
bool geometries_touch(const Geometry& a, const Geometry& b);

// Chord-midpoint skeleton over eight evenly spaced slicing lines.
Skeleton polygon_skeleton(const Polygon& poly, double label_height);

// Direction (radians) of the polyline around vertex `index`, by central difference.
double polyline_direction_at(const Polyline& line, std::size_t index);

}  // namespace labelforge
