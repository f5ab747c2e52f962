#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "instances.hpp"
#include "labelforge/errors.hpp"
#include "labelforge/sliding.hpp"

using namespace labelforge;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

LayerConfig radii(double r1, double r2, double r3) {
  LayerConfig l;
  l.absolute = std::array<double, 3>{r1, r2, r3};
  return l;
}

const CandidatePosition& candidate(const LabelingProblem& p, std::size_t feature, int layer, double beta) {
  for (const auto& c : p.sets[feature].positions) {
    if (c.layer == layer && c.beta && std::abs(*c.beta - beta) < 1e-9) return c;
  }
  throw std::logic_error("no such candidate");
}

// Every label on its best candidate, moved far away unless listed in `keep`.
Placement parked(const LabelingProblem& p, std::vector<std::size_t> keep = {}) {
  Placement out;
  for (std::size_t i = 0; i < p.features.size(); ++i) {
    CandidatePosition c = p.sets[i].positions.front();
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) {
      c.box.center = {1000.0 + 20.0 * static_cast<double>(i), 1000.0};
    }
    out.labels.push_back(c);
    out.optimized.push_back(p.sets[i].positions.size() == kCandidatesPerFeature);
  }
  return out;
}

SlideConfig with_epsilon(double eps) {
  SlideConfig cfg;
  cfg.epsilon = eps;
  return cfg;
}

}  // namespace

TEST_CASE("move distance") {
  CHECK(move_distance({3, 4}, {0, 0}, 0.5) == Approx(5.5));
  CHECK(move_distance({1, 1}, {1, 1}, 0.5) == Approx(0.5));
  CHECK_THROWS_AS(move_distance({0, 0}, {1, 1}, 0.0), ConfigError);
  CHECK_THROWS_AS(with_epsilon(0.0).validate(), ConfigError);
  CHECK(SlideConfig{}.epsilon_for({"abc", 1.0, 4.0}) == Approx(0.2));
}

TEST_CASE("conflict detection") {
  auto p = lf_test::build_problem({lf_test::make_point(0, 0, 0, "xxxx"), lf_test::make_point(1, 3, 0, "y"),
                                   lf_test::make_line(2, {{2, -5}, {2, 5}}, "z")},
                                  radii(0.5, 1, 1.5));
  Placement pl = parked(p);
  CHECK(detect_conflicts(pl, p.features).empty());

  pl.labels[0].box = make_box({2.5, 0}, 4, 2);  // covers the point at (3,0) and the line at x=2
  const auto records = detect_conflicts(pl, p.features);
  REQUIRE(records.size() == 2);
  CHECK(records[0].conflicting_feature_id == 1);
  CHECK(records[0].conflicting_kind == FeatureKind::point);
  CHECK(records[1].conflicting_kind == FeatureKind::line);
  for (const auto& r : records) CHECK(box_feature_intersect(pl.labels[0].box, p.features[r.feature_index].geometry));
  // r is on the box boundary or inside; b is a corner.
  const auto corners = label_box_corners(pl.labels[0].box);
  CHECK(std::find(corners.begin(), corners.end(), records[1].b) != corners.end());

  pl.labels[0].box = make_box({10, 0}, 4, 2);
  CHECK(detect_label_conflicts(pl, p.features, 0).empty());
}

TEST_CASE("point label switches to a free fixed position first") {
  auto p = lf_test::build_problem({lf_test::make_point(0, 0, 0, "xxxx"), lf_test::make_line(1, {{3, -3}, {3, 0.2}}, "l")},
                                  radii(0.5, 1, 1.5));
  Placement pl = parked(p);
  pl.labels[0] = candidate(p, 0, 1, 0.0);
  const auto conflicts = detect_label_conflicts(pl, p.features, 0);
  REQUIRE(conflicts.size() == 1);
  const SlideConfig cfg = with_epsilon(0.1);
  const FeatureIndex index(p.features);
  const auto move = slide_point_label(0, conflicts, pl, {p, index, cfg, {}});
  REQUIRE(move);
  CHECK_FALSE(move->directional);
  CHECK(move->outcome == SlideOutcome::eliminated);
  CHECK(move->position.box == candidate(p, 0, 1, kPi / 4).box);
}

TEST_CASE("point label moves diagonally when every fixed position conflicts") {
  std::vector<Feature> fs{lf_test::make_point(0, 0, 0, "xxxx"), lf_test::make_line(1, {{4.2, 0.7}, {6, 3}}, "l")};
  const std::vector<Point2D> blockers{{4.6, 0}, {2, 2}, {-1, 2}, {-2.5, 1.5}, {-2.5, 0}, {-2.5, -1.5}, {-1, -2}, {2.5, -1.5}};
  for (const auto& b : blockers) {
    fs.push_back(lf_test::make_point(static_cast<std::int64_t>(fs.size()), b.x, b.y, "b"));
  }
  auto p = lf_test::build_problem(fs, radii(0.5, 1, 1.5));
  Placement pl = parked(p);
  pl.labels[0] = candidate(p, 0, 1, 0.0);
  const FeatureIndex index(p.features);
  for (const auto& c : p.sets[0].positions) {
    if (!(c.box == pl.labels[0].box)) CHECK(index.penalty(c.box, 0) > 0);
  }
  const SlideConfig cfg = with_epsilon(0.1);
  const auto conflicts = detect_label_conflicts(pl, p.features, 0);
  REQUIRE(conflicts.size() == 1);
  const auto move = slide_point_label(0, conflicts, pl, {p, index, cfg, {}});
  REQUIRE(move);
  CHECK(move->directional);
  CHECK(move->outcome == SlideOutcome::eliminated);
  CHECK(move->direction == Approx(0.75 * kPi));
  const double d = std::hypot(0.3, 0.3) + 0.1;
  CHECK(move->distance == Approx(d));
  CHECK(distance(move->position.box.center, pl.labels[0].box.center) == Approx(d));
  CHECK(index.penalty(move->position.box, 0) == 0);

  const auto result = apply_sliding(pl, p, cfg, {});
  CHECK(result.report.initial_conflicts == 1);
  CHECK(result.report.eliminated == 1);
  CHECK(result.report.score_after < result.report.score_before);
}

TEST_CASE("area label slides clear of a line and avoids other labels") {
  auto p = lf_test::build_problem({lf_test::make_area(0, {{0, 0}, {80, 0}, {80, 20}, {0, 20}}, "xxxxxx"),
                                   lf_test::make_line(1, {{0, 0}, {1, 1}}, "l"), lf_test::make_point(2, 200, 200, "q")});
  Placement pl = parked(p, {0});
  const LabelBox& box = pl.labels[0].box;
  REQUIRE(box.angle == 0.0);
  const double xc = box.center.x;
  REQUIRE(box.center.y == Approx(10.0));
  p.features[1].geometry = make_polyline({{xc + 2.8, 10.8}, {xc + 10, 19}});
  const FeatureIndex index(p.features);
  const SlideConfig cfg = with_epsilon(0.1);
  const auto conflicts = detect_label_conflicts(pl, p.features, 0);
  REQUIRE(conflicts.size() == 1);

  SUBCASE("first free direction wins") {
    const auto move = slide_line_area_label(0, conflicts, pl, {p, index, cfg, {}});
    REQUIRE(move);
    CHECK(move->direction == Approx(kPi));
    CHECK(move->outcome == SlideOutcome::eliminated);
    CHECK_FALSE(box_feature_intersect(move->position.box, p.features[0].geometry));
  }
  SUBCASE("a move onto another label is rejected") {
    pl.labels[2].box = make_box({xc - 4, 10}, 1.5, 1);
    const auto move = slide_line_area_label(0, conflicts, pl, {p, index, cfg, {}});
    REQUIRE(move);
    CHECK(move->direction == Approx(1.5 * kPi));
    CHECK_FALSE(boxes_intersect(move->position.box, pl.labels[2].box));
  }
}

TEST_CASE("label stays when no direction helps") {
  auto p = lf_test::build_problem({lf_test::make_area(0, {{0, 0}, {80, 0}, {80, 20}, {0, 20}}, "xxxxxx"),
                                   lf_test::make_line(1, {{0, 0}, {1, 1}}, "l")});
  Placement pl = parked(p, {0});
  const double xc = pl.labels[0].box.center.x;
  p.features[1].geometry = make_polyline({{xc - 10, 0}, {xc + 10, 20}});
  const FeatureIndex index(p.features);
  const SlideConfig cfg = with_epsilon(0.1);
  const auto conflicts = detect_label_conflicts(pl, p.features, 0);
  REQUIRE(conflicts.size() == 1);
  CHECK_FALSE(slide_line_area_label(0, conflicts, pl, {p, index, cfg, {}}));
  const auto result = apply_sliding(pl, p, cfg, {});
  CHECK(result.report.eliminated == 0);
  CHECK(result.report.better == 0);
  CHECK(result.report.score_after == result.report.score_before);
}

TEST_CASE("conflict-free input is left alone") {
  auto p = lf_test::build_problem({lf_test::make_point(0, 0, 0, "a"), lf_test::make_point(1, 50, 50, "b")});
  const Placement pl = parked(p);
  const auto result = apply_sliding(pl, p, {}, {});
  CHECK(result.report.initial_conflicts == 0);
  CHECK(result.report.eliminated == 0);
  CHECK(result.report.better == 0);
  for (std::size_t i = 0; i < pl.labels.size(); ++i) CHECK(result.placement.labels[i].box == pl.labels[i].box);
}

TEST_CASE("strict mode skips labels hitting two kinds") {
  auto p = lf_test::build_problem({lf_test::make_point(0, 0, 0, "xxxx"), lf_test::make_point(1, 3, 0, "y"),
                                   lf_test::make_line(2, {{2, -5}, {2, 5}}, "z")},
                                  radii(0.5, 1, 1.5));
  Placement pl = parked(p);
  pl.labels[0].box = make_box({2.5, 0}, 4, 2);
  SlideConfig cfg = with_epsilon(0.1);
  cfg.single_kind_only = true;
  const auto result = apply_sliding(pl, p, cfg, {});
  CHECK(result.placement.labels[0].box == pl.labels[0].box);
}

TEST_CASE("sliding soundness on random instances") {
  std::mt19937_64 rng(101);
  int moved = 0;
  for (int t = 0; t < 200; ++t) {
    auto p = lf_test::build_problem(lf_test::random_features(rng, 4 + rng() % 20, 40));
    const Placement pl = placement_for(p, lf_test::random_genes(p.full.size(), rng));
    const QualityWeights w;
    const auto before = total_score(pl, p.features, w);
    const auto result = apply_sliding(pl, p, {}, w);
    const auto after = total_score(result.placement, p.features, w);
    CHECK(after.lf_conflict_count <= before.lf_conflict_count);
    CHECK(after.ll_conflict_count <= before.ll_conflict_count);
    CHECK(after.rho2 <= before.rho2 + 1e-9);
    if (result.report.eliminated > 0) CHECK(after.rho2 < before.rho2);
    CHECK(result.report.eliminated + result.report.better <= result.report.initial_conflicts);
    CHECK(result.report.score_before == Approx(before.rho2));
    CHECK(result.report.score_after == Approx(after.rho2));
    moved += static_cast<int>(result.report.eliminated + result.report.better);
    if (result.report.eliminated + result.report.better == 0) {
      const auto again = apply_sliding(result.placement, p, {}, w);
      for (std::size_t i = 0; i < pl.labels.size(); ++i) CHECK(again.placement.labels[i].box == pl.labels[i].box);
    }
  }
  CHECK(moved > 0);
}

TEST_CASE("directional moves travel d_mve") {
  std::mt19937_64 rng(202);
  int directional = 0;
  for (int t = 0; t < 200; ++t) {
    auto p = lf_test::build_problem(lf_test::random_features(rng, 4 + rng() % 20, 40));
    const Placement pl = placement_for(p, lf_test::random_genes(p.full.size(), rng));
    const FeatureIndex index(p.features);
    const SlideConfig cfg;
    for (std::size_t i = 0; i < pl.labels.size(); ++i) {
      const auto conflicts = detect_label_conflicts(pl, p.features, i);
      if (conflicts.empty()) continue;
      const SlideContext ctx{p, index, cfg, {}};
      const auto move = p.features[i].kind == FeatureKind::point ? slide_point_label(i, conflicts, pl, ctx)
                                                                 : slide_line_area_label(i, conflicts, pl, ctx);
      if (!move || !move->directional) continue;
      ++directional;
      double d = 0;
      for (const auto& c : conflicts) d = std::max(d, move_distance(c.r, c.b, cfg.epsilon_for(p.features[i].label)));
      CHECK(move->distance == Approx(d));
      const Point2D shift = move->position.box.center - pl.labels[i].box.center;
      CHECK(dot(shift, unit_vector(move->direction)) >= d - 1e-9);
    }
  }
  CHECK(directional > 0);
}

TEST_CASE("five removable conflicts are all eliminated") {
  std::vector<Feature> fs;
  for (int k = 0; k < 5; ++k) {
    const double x = 100.0 * k;
    fs.push_back(lf_test::make_point(2 * k, x, 0, "xxxx"));
    fs.push_back(lf_test::make_line(2 * k + 1, {{x + 3, -3}, {x + 3, 0.2}}, "l"));
  }
  auto p = lf_test::build_problem(fs, radii(0.5, 1, 1.5));
  Placement pl = parked(p);
  for (std::size_t k = 0; k < 5; ++k) pl.labels[2 * k] = candidate(p, 2 * k, 1, 0.0);
  REQUIRE(detect_conflicts(pl, p.features).size() == 5);
  const auto result = apply_sliding(pl, p, with_epsilon(0.1), {});
  CHECK(result.report.initial_conflicts == 5);
  CHECK(result.report.eliminated == 5);
  CHECK(result.report.score_after < result.report.score_before);
  CHECK(detect_conflicts(result.placement, p.features).empty());
}
