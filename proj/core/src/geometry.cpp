#include "labelforge/geometry.hpp"

#include <algorithm>
#include <limits>

#include "labelforge/errors.hpp"

namespace labelforge {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSkeletonStrips = 8;

double box_tolerance(const LabelBox& box) { return 1e-9 * std::max({1.0, box.length, box.height}); }

// Liang-Barsky clip of the local-frame segment against the box interior shrunk
// by the tolerance. Returns the parametric interval when non-empty.
std::optional<std::pair<double, double>> clip_local(const LabelBox& box, Point2D a, Point2D b) {
  const double tol = box_tolerance(box);
  const double hx = box.length / 2.0 - tol;
  const double hy = box.height / 2.0 - tol;
  if (hx <= 0.0 || hy <= 0.0) return std::nullopt;
  const Point2D d = b - a;
  const std::array<double, 4> p{-d.x, d.x, -d.y, d.y};
  const std::array<double, 4> q{a.x + hx, hx - a.x, a.y + hy, hy - a.y};
  double t0 = 0.0;
  double t1 = 1.0;
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return std::nullopt;
  }
  return std::pair{t0, t1};
}

template <class Fn>
void for_each_segment(const std::vector<Point2D>& pts, Fn&& fn) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) fn(pts[i], pts[i + 1]);
}

double orient(Point2D a, Point2D b, Point2D c) { return cross(b - a, c - a); }

bool on_segment(Point2D a, Point2D b, Point2D p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Arc-length resampling to `count` evenly spaced points including both ends.
std::vector<Point2D> resample(const std::vector<Point2D>& pts, std::size_t count) {
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) cumulative.push_back(cumulative.back() + distance(pts[i - 1], pts[i]));
  const double total = cumulative.back();
  std::vector<Point2D> out;
  std::size_t seg = 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 1 < pts.size() && cumulative[seg] < target) ++seg;
    const double span = cumulative[seg] - cumulative[seg - 1];
    const double t = span > 0.0 ? (target - cumulative[seg - 1]) / span : 0.0;
    out.push_back(pts[seg - 1] + (pts[seg] - pts[seg - 1]) * std::clamp(t, 0.0, 1.0));
  }
  return out;
}

}  // namespace

void Aabb::extend(const Aabb& o) {
  min_x = std::min(min_x, o.min_x);
  min_y = std::min(min_y, o.min_y);
  max_x = std::max(max_x, o.max_x);
  max_y = std::max(max_y, o.max_y);
}

void Aabb::extend(Point2D p) { extend(Aabb{p.x, p.y, p.x, p.y}); }

double normalize_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double readable_angle(double direction) {
  double a = normalize_angle(direction);
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (a > half_pi + 1e-12 && a <= 3.0 * half_pi + 1e-12) a -= std::numbers::pi;
  return normalize_angle(a);
}

LabelBox make_box(Point2D center, double length, double height, double angle) {
  return LabelBox{center, length, height, normalize_angle(angle)};
}

Polyline make_polyline(std::vector<Point2D> vertices) {
  std::vector<Point2D> cleaned;
  cleaned.reserve(vertices.size());
  for (const Point2D& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidGeometry("polyline has a non-finite coordinate");
    if (cleaned.empty() || !(cleaned.back() == p)) cleaned.push_back(p);
  }
  if (cleaned.size() < 2) throw InvalidGeometry("polyline needs at least two distinct vertices");
  return Polyline{std::move(cleaned)};
}

Polygon make_polygon(std::vector<Point2D> ring) {
  std::vector<Point2D> cleaned;
  cleaned.reserve(ring.size() + 1);
  for (const Point2D& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidGeometry("polygon has a non-finite coordinate");
    if (cleaned.empty() || !(cleaned.back() == p)) cleaned.push_back(p);
  }
  if (cleaned.size() > 1 && cleaned.front() == cleaned.back()) cleaned.pop_back();
  if (cleaned.size() < 3) throw InvalidGeometry("polygon ring needs at least three distinct vertices");
  cleaned.push_back(cleaned.front());
  Polygon poly{std::move(cleaned)};
  if (std::abs(signed_area(poly.ring)) <= 0.0) throw InvalidGeometry("polygon has zero area");
  if (!polygon_is_simple(poly)) throw InvalidGeometry("polygon ring self-intersects");
  return poly;
}

std::array<Point2D, 4> label_box_corners(const LabelBox& box) {
  const Point2D u = unit_vector(box.angle) * (box.length / 2.0);
  const Point2D v = Point2D{-std::sin(box.angle), std::cos(box.angle)} * (box.height / 2.0);
  const Point2D c = box.center;
  return {c + u + v, c - u + v, c - u - v, c + u - v};
}

Point2D to_box_frame(const LabelBox& box, Point2D p) {
  const Point2D d = p - box.center;
  const double c = std::cos(box.angle);
  const double s = std::sin(box.angle);
  return {d.x * c + d.y * s, -d.x * s + d.y * c};
}

bool boxes_intersect(const LabelBox& a, const LabelBox& b) {
  const std::array<Point2D, 4> axes{unit_vector(a.angle), unit_vector(a.angle + std::numbers::pi / 2.0),
                                    unit_vector(b.angle), unit_vector(b.angle + std::numbers::pi / 2.0)};
  const Point2D ua = axes[0], va = axes[1], ub = axes[2], vb = axes[3];
  const Point2D delta = b.center - a.center;
  const double eps = 1e-9 * std::max({1.0, a.length, a.height, b.length, b.height});
  for (const Point2D& n : axes) {
    const double ra = a.length / 2.0 * std::abs(dot(ua, n)) + a.height / 2.0 * std::abs(dot(va, n));
    const double rb = b.length / 2.0 * std::abs(dot(ub, n)) + b.height / 2.0 * std::abs(dot(vb, n));
    if (ra + rb - std::abs(dot(delta, n)) <= eps) return false;
  }
  return true;
}

bool box_contains_point(const LabelBox& box, Point2D p) {
  const Point2D local = to_box_frame(box, p);
  const double tol = box_tolerance(box);
  return std::abs(local.x) < box.length / 2.0 - tol && std::abs(local.y) < box.height / 2.0 - tol;
}

bool box_segment_intersect(const LabelBox& box, Point2D a, Point2D b) {
  return clip_local(box, to_box_frame(box, a), to_box_frame(box, b)).has_value();
}

std::optional<Point2D> box_segment_entry(const LabelBox& box, Point2D a, Point2D b) {
  const auto clip = clip_local(box, to_box_frame(box, a), to_box_frame(box, b));
  if (!clip) return std::nullopt;
  return a + (b - a) * clip->first;
}

bool box_feature_intersect(const LabelBox& box, const Geometry& geometry) {
  return std::visit(
      [&](const auto& g) -> bool {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Point2D>) {
          return box_contains_point(box, g);
        } else {
          const std::vector<Point2D>& pts = [&]() -> const std::vector<Point2D>& {
            if constexpr (std::is_same_v<T, Polyline>) {
              return g.vertices;
            } else {
              return g.ring;
            }
          }();
          for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (box_segment_intersect(box, pts[i], pts[i + 1])) return true;
          }
          return false;
        }
      },
      geometry);
}

std::optional<Point2D> box_feature_contact(const LabelBox& box, const Geometry& geometry) {
  if (const auto* p = std::get_if<Point2D>(&geometry)) {
    if (box_contains_point(box, *p)) return *p;
    return std::nullopt;
  }
  const std::vector<Point2D>& pts =
      std::holds_alternative<Polyline>(geometry) ? std::get<Polyline>(geometry).vertices : std::get<Polygon>(geometry).ring;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (auto entry = box_segment_entry(box, pts[i], pts[i + 1])) return entry;
  }
  return std::nullopt;
}

Aabb bounds(std::span<const Point2D> points) {
  Aabb box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Point2D& p : points) box.extend(p);
  return box;
}

Aabb bounds(const LabelBox& box) {
  const auto corners = label_box_corners(box);
  return bounds(std::span<const Point2D>(corners));
}

Aabb bounds(const Geometry& geometry) {
  return std::visit(
      [](const auto& g) -> Aabb {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Point2D>) {
          return Aabb{g.x, g.y, g.x, g.y};
        } else if constexpr (std::is_same_v<T, Polyline>) {
          return bounds(std::span<const Point2D>(g.vertices));
        } else {
          return bounds(std::span<const Point2D>(g.ring));
        }
      },
      geometry);
}

double signed_area(std::span<const Point2D> ring) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) acc += cross(ring[i], ring[i + 1]);
  return acc / 2.0;
}

double polyline_length(const Polyline& line) {
  double total = 0.0;
  for_each_segment(line.vertices, [&](Point2D a, Point2D b) { total += distance(a, b); });
  return total;
}

bool segments_intersect(Point2D a, Point2D b, Point2D c, Point2D d) {
  const int o1 = sign(orient(a, b, c));
  const int o2 = sign(orient(a, b, d));
  const int o3 = sign(orient(c, d, a));
  const int o4 = sign(orient(c, d, b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool point_in_polygon(Point2D p, const Polygon& poly) {
  const auto& r = poly.ring;
  bool inside = false;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const Point2D a = r[i];
    const Point2D b = r[i + 1];
    if (orient(a, b, p) == 0.0 && on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(const Polygon& poly) {
  const auto& r = poly.ring;
  const std::size_t n = r.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex: reject folds back.
        const Point2D shared = (j == i + 1) ? r[j] : r[i];
        const Point2D a = (j == i + 1) ? r[i] : r[i + 1];
        const Point2D b = (j == i + 1) ? r[j + 1] : r[j];
        if (orient(a, shared, b) == 0.0 && dot(a - shared, b - shared) > 0.0) return false;
        continue;
      }
      if (segments_intersect(r[i], r[i + 1], r[j], r[j + 1])) return false;
    }
  }
  return true;
}

bool geometries_touch(const Geometry& a, const Geometry& b) {
  auto vertices_of = [](const Geometry& g) -> std::vector<Point2D> {
    if (const auto* p = std::get_if<Point2D>(&g)) return {*p};
    if (const auto* l = std::get_if<Polyline>(&g)) return l->vertices;
    return std::get<Polygon>(g).ring;
  };
  if (!bounds(a).overlaps(bounds(b))) return false;
  const std::vector<Point2D> va = vertices_of(a);
  const std::vector<Point2D> vb = vertices_of(b);
  for (std::size_t i = 0; i + 1 < va.size(); ++i) {
    for (std::size_t j = 0; j + 1 < vb.size(); ++j) {
      if (segments_intersect(va[i], va[i + 1], vb[j], vb[j + 1])) return true;
    }
  }
  if (const auto* pa = std::get_if<Polygon>(&a)) {
    for (const Point2D& p : vb) {
      if (point_in_polygon(p, *pa)) return true;
    }
  }
  if (const auto* pb = std::get_if<Polygon>(&b)) {
    for (const Point2D& p : va) {
      if (point_in_polygon(p, *pb)) return true;
    }
  }
  if (va.size() == 1 && vb.size() == 1) return va[0] == vb[0];
  if (va.size() == 1 || vb.size() == 1) {
    const Point2D p = va.size() == 1 ? va[0] : vb[0];
    const auto& other = va.size() == 1 ? vb : va;
    for (std::size_t i = 0; i + 1 < other.size(); ++i) {
      if (orient(other[i], other[i + 1], p) == 0.0 && on_segment(other[i], other[i + 1], p)) return true;
    }
  }
  return false;
}

Skeleton polygon_skeleton(const Polygon& poly, double label_height) {
  const Aabb box = bounds(std::span<const Point2D>(poly.ring));
  const bool horizontal = box.width() >= box.height();
  // s runs along the long axis, t across it.
  auto s_of = [&](Point2D p) { return horizontal ? p.x : p.y; };
  auto t_of = [&](Point2D p) { return horizontal ? p.y : p.x; };
  auto point_at = [&](double s, double t) { return horizontal ? Point2D{s, t} : Point2D{t, s}; };

  const double s_min = horizontal ? box.min_x : box.min_y;
  const double s_span = horizontal ? box.width() : box.height();

  std::vector<Point2D> anchors;
  std::vector<double> crossings;
  for (int k = 0; k < kSkeletonStrips; ++k) {
    const double s = s_min + (k + 0.5) * s_span / kSkeletonStrips;
    crossings.clear();
    for (std::size_t i = 0; i + 1 < poly.ring.size(); ++i) {
      const Point2D a = poly.ring[i];
      const Point2D b = poly.ring[i + 1];
      if ((s_of(a) > s) != (s_of(b) > s)) {
        const double f = (s - s_of(a)) / (s_of(b) - s_of(a));
        crossings.push_back(t_of(a) + f * (t_of(b) - t_of(a)));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    double best_len = 0.0;
    std::optional<double> best_mid;
    for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
      const double len = crossings[i + 1] - crossings[i];
      if (len > best_len) {
        best_len = len;
        best_mid = (crossings[i] + crossings[i + 1]) / 2.0;
      }
    }
    if (best_mid) anchors.push_back(point_at(s, *best_mid));
  }
  if (anchors.size() < 2) throw DegenerateSkeleton("polygon slicing produced fewer than two chords");
  if (anchors.size() < static_cast<std::size_t>(kSkeletonStrips)) anchors = resample(anchors, kSkeletonStrips);

  Skeleton out;
  out.horizontal = horizontal;
  out.spine.vertices = anchors;
  const Point2D offset = horizontal ? Point2D{0.0, label_height} : Point2D{label_height, 0.0};
  for (const Point2D& a : anchors) {
    out.above.vertices.push_back(a + offset);
    out.below.vertices.push_back(a - offset);
  }
  return out;
}

double polyline_direction_at(const Polyline& line, std::size_t index) {
  const auto& v = line.vertices;
  const std::size_t lo = index == 0 ? 0 : index - 1;
  const std::size_t hi = std::min(index + 1, v.size() - 1);
  const Point2D d = v[hi] - v[lo];
  return std::atan2(d.y, d.x);
}

}  // namespace labelforge
