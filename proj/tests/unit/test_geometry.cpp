#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "labelforge/errors.hpp"
#include "labelforge/geometry.hpp"
#include "reference.hpp"

using namespace labelforge;
using doctest::Approx;

namespace {

void check_point(Point2D got, Point2D want, double tol = 1e-12) {
  CHECK(got.x == Approx(want.x).epsilon(0).scale(1).epsilon(tol));
  CHECK(got.y == Approx(want.y).epsilon(0).scale(1).epsilon(tol));
}

bool near(Point2D a, Point2D b, double tol) { return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol; }

LabelBox random_box(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> pos(-spread, spread);
  std::uniform_real_distribution<double> size(0.2, 6.0);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  return make_box({pos(rng), pos(rng)}, size(rng), size(rng), ang(rng));
}

}  // namespace

TEST_CASE("corners of an axis-aligned box") {
  const auto c = label_box_corners(make_box({0, 0}, 4, 2, 0));
  CHECK(c[0] == Point2D{2, 1});
  CHECK(c[1] == Point2D{-2, 1});
  CHECK(c[2] == Point2D{-2, -1});
  CHECK(c[3] == Point2D{2, -1});
}

TEST_CASE("corners of a quarter-turned box match the rotation oracle") {
  const auto c = label_box_corners(make_box({0, 0}, 4, 2, std::numbers::pi / 2));
  const std::array<Point2D, 4> want{{{-1, 2}, {-1, -2}, {1, -2}, {1, 2}}};
  for (int i = 0; i < 4; ++i) CHECK(near(c[static_cast<std::size_t>(i)], want[static_cast<std::size_t>(i)], 1e-12));
}

TEST_CASE("corner distances are rotation invariant") {
  const auto c = label_box_corners(make_box({5, 5}, 2, 2, std::numbers::pi / 4));
  for (const auto& p : c) CHECK(distance(p, {5, 5}) == Approx(std::sqrt(2.0)).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const LabelBox b = random_box(rng, 50);
    const auto got = label_box_corners(b);
    const auto want = lf_test::rotated_corners(b);
    const double r = std::hypot(b.length / 2, b.height / 2);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(near(got[k], want[k], 1e-9));
      CHECK(std::abs(distance(got[k], b.center) - r) <= 1e-9);
    }
  }
}

TEST_CASE("angles normalize into [0, 2pi)") {
  CHECK(normalize_angle(-std::numbers::pi / 2) == Approx(1.5 * std::numbers::pi));
  CHECK(normalize_angle(2 * std::numbers::pi) == 0.0);
  CHECK(make_box({0, 0}, 1, 1, 7.0).angle == Approx(7.0 - 2 * std::numbers::pi));
  // Text never reads upside down.
  CHECK(readable_angle(std::numbers::pi) == Approx(0.0));
  CHECK(readable_angle(-std::numbers::pi / 4) == Approx(2 * std::numbers::pi - std::numbers::pi / 4));
}

TEST_CASE("box overlap predicate") {
  const LabelBox a = make_box({0, 0}, 1, 1);
  CHECK(boxes_intersect(a, a));
  CHECK_FALSE(boxes_intersect(a, make_box({1000, 1000}, 1, 1)));
  SUBCASE("a shared edge is not an overlap") {
    const LabelBox b = make_box({1, 0}, 1, 1);
    CHECK(lf_test::box_overlap_area(a, b) == Approx(0.0));
    CHECK_FALSE(boxes_intersect(a, b));
  }
  SUBCASE("corner touch of rotated boxes") {
    const LabelBox d = make_box({std::sqrt(2.0) / 2 + 0.5, 0}, 1, 1, std::numbers::pi / 4);
    CHECK_FALSE(boxes_intersect(a, d));
  }
}

TEST_CASE("separating-axis test agrees with the clipping-area oracle") {
  std::mt19937_64 rng(11);
  int overlaps = 0;
  for (int i = 0; i < 1000; ++i) {
    const LabelBox a = random_box(rng, 4);
    const LabelBox b = random_box(rng, 4);
    const bool oracle = lf_test::box_overlap_area(a, b) > 1e-12;
    CHECK(boxes_intersect(a, b) == oracle);
    CHECK(boxes_intersect(a, b) == boxes_intersect(b, a));
    overlaps += oracle;
  }
  CHECK(overlaps > 100);
  CHECK(overlaps < 900);
}

TEST_CASE("box against feature geometries") {
  const LabelBox box = make_box({0, 0}, 4, 2);
  CHECK(box_feature_intersect(box, Point2D{0, 0}));
  CHECK_FALSE(box_feature_intersect(box, Point2D{10, 10}));
  CHECK_FALSE(box_feature_intersect(box, Point2D{2, 0}));  // on the boundary
  CHECK(box_feature_intersect(box, make_polyline({{-10, 0}, {10, 0}})));
  CHECK(lf_test::segment_hits_box(box, {-10, 0}, {10, 0}));
  CHECK(box_feature_intersect(box, make_polyline({{-0.5, 0.2}, {0.5, -0.2}})));  // fully inside
  CHECK_FALSE(box_feature_intersect(box, make_polyline({{-10, 1}, {10, 1}})));   // grazes the top edge
  SUBCASE("polygons conflict only through their boundary") {
    const Polygon big = make_polygon({{-10, -10}, {10, -10}, {10, 10}, {-10, 10}});
    CHECK_FALSE(box_feature_intersect(box, big));
    const Polygon edge = make_polygon({{1, -5}, {10, -5}, {10, 5}, {1, 5}});
    CHECK(box_feature_intersect(box, edge));
  }
}

TEST_CASE("segment predicate agrees with the Cyrus-Beck oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-6, 6);
  for (int i = 0; i < 2000; ++i) {
    const LabelBox box = random_box(rng, 2);
    const Point2D a{pos(rng), pos(rng)}, b{pos(rng), pos(rng)};
    CHECK(box_segment_intersect(box, a, b) == lf_test::segment_hits_box(box, a, b));
  }
}

TEST_CASE("contact point is where the feature enters the box") {
  const LabelBox box = make_box({0, 0}, 4, 2);
  const auto r = box_feature_contact(box, make_polyline({{-10, 0}, {10, 0}}));
  REQUIRE(r);
  check_point(*r, {-2, 0}, 1e-8);  // predicates shrink the box by a relative tolerance
  CHECK_FALSE(box_feature_contact(box, Point2D{5, 5}));
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(make_polyline({{0, 0}}), InvalidGeometry);
  CHECK_THROWS_AS(make_polyline({{0, 0}, {0, 0}}), InvalidGeometry);
  CHECK_THROWS_AS(make_polygon({{0, 0}, {1, 0}, {2, 0}}), InvalidGeometry);
  CHECK_THROWS_AS(make_polygon({{0, 0}, {2, 2}, {2, 0}, {0, 2}}), InvalidGeometry);  // bow tie
  const Polygon open = make_polygon({{0, 0}, {1, 0}, {1, 1}});
  CHECK(open.ring.front() == open.ring.back());
  CHECK(open.ring.size() == 4);
}

TEST_CASE("skeleton of a wide rectangle is its midline") {
  const Polygon rect = make_polygon({{0, 0}, {80, 0}, {80, 20}, {0, 20}});
  const Skeleton s = polygon_skeleton(rect, 2.0);
  REQUIRE(s.spine.vertices.size() == 8);
  CHECK(s.horizontal);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(s.spine.vertices[i].x == Approx(5.0 + 10.0 * static_cast<double>(i)));
    CHECK(s.spine.vertices[i].y == Approx(10.0));
    CHECK(s.above.vertices[i].y == Approx(12.0));
    CHECK(s.below.vertices[i].y == Approx(8.0));
  }
}

TEST_CASE("skeleton of a square slices vertically") {
  const Skeleton s = polygon_skeleton(make_polygon({{0, 0}, {10, 0}, {10, 10}, {0, 10}}), 1.0);
  REQUIRE(s.spine.vertices.size() == 8);
  CHECK(s.horizontal);
  CHECK(s.spine.vertices[0].x == Approx(0.625));
  CHECK(s.spine.vertices[7].x == Approx(9.375));
  for (const auto& p : s.spine.vertices) CHECK(p.y == Approx(5.0));
}

TEST_CASE("skeleton of a tall rectangle runs along y") {
  const Skeleton s = polygon_skeleton(make_polygon({{0, 0}, {4, 0}, {4, 80}, {0, 80}}), 1.0);
  CHECK_FALSE(s.horizontal);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(s.spine.vertices[i].x == Approx(2.0));
    CHECK(s.spine.vertices[i].y == Approx(5.0 + 10.0 * static_cast<double>(i)));
  }
}

TEST_CASE("skeleton anchors stay inside random convex polygons") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double rx = 2 + 20 * u(rng), ry = 2 + 20 * u(rng);
    const int k = 3 + static_cast<int>(u(rng) * 10);
    std::vector<double> angles;
    for (int i = 0; i < k; ++i) angles.push_back(2 * std::numbers::pi * u(rng));
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(),
                             [](double a, double b) { return b - a < 1e-3; }),
                 angles.end());
    if (angles.size() < 3) continue;
    std::vector<Point2D> ring;
    for (double a : angles) ring.push_back({rx * std::cos(a), ry * std::sin(a)});
    Polygon poly;
    try {
      poly = make_polygon(ring);
    } catch (const InvalidGeometry&) {
      continue;
    }
    const Skeleton s = polygon_skeleton(poly, 1.0);
    CHECK(s.spine.vertices.size() == 8);
    for (const auto& p : s.spine.vertices) CHECK(point_in_polygon(p, poly));
  }
}

TEST_CASE("skeleton of a U-shape takes the longest chord") {
  // Legs at x in [0,10] and [30,40], joined along y in [0,10]; the slicing lines run vertically.
  const Polygon u = make_polygon({{0, 0}, {40, 0}, {40, 30}, {30, 30}, {30, 10}, {10, 10}, {10, 30}, {0, 30}});
  const Skeleton s = polygon_skeleton(u, 1.0);
  REQUIRE(s.spine.vertices.size() == 8);
  CHECK(s.spine.vertices[0].y == Approx(15.0));  // full leg chord [0,30]
  CHECK(s.spine.vertices[3].y == Approx(5.0));   // only the base chord [0,10]
}
