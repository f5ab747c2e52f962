#include <doctest.h>

#include <filesystem>
#include <random>

#include "instances.hpp"
#include "labelforge/errors.hpp"
#include "labelforge/pipeline.hpp"

using namespace labelforge;
using doctest::Approx;

namespace {

Dataset load(const std::string& name) { return read_geojson(lf_test::fixture_path(name)); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("labelforge_io_" + name);
}

PipelineResult quick_run(const std::string& fixture, std::size_t workers = 1) {
  PipelineConfig cfg;
  cfg.optimizer.iterations = 40;
  cfg.optimizer.population_size = 20;
  cfg.workers = workers;
  return run_pipeline(load(fixture), cfg);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("tiny fixture") {
  const auto ds = load("tiny.geojson");
  REQUIRE(ds.features.size() == 3);
  CHECK(ds.features[0].kind == FeatureKind::point);
  CHECK(ds.features[1].kind == FeatureKind::line);
  CHECK(ds.features[2].kind == FeatureKind::area);
  CHECK(ds.features[0].label.text == "Springfield");
  CHECK(ds.features[0].label.length() == Approx(11.0 * ds.features[0].label.char_width));
  CHECK(ds.features[0].name == "town");
  for (std::size_t i = 0; i < ds.features.size(); ++i) CHECK(ds.features[i].id == static_cast<std::int64_t>(i));
  CHECK(ds.bounds.min_x == 0.0);
  CHECK(ds.bounds.max_x == 60.0);
  CHECK(ds.bounds.max_y == 40.0);
  CHECK(ds.warnings.empty());
}

TEST_CASE("defaults apply when properties omit label sizes") {
  const auto ds = parse_geojson(
      R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Point","coordinates":[0,0]},"properties":{"name":"ab"}}]})",
      {3.0, 4.0});
  REQUIRE(ds.features.size() == 1);
  CHECK(ds.features[0].label.char_width == 3.0);
  CHECK(ds.features[0].label.height == 4.0);
  CHECK(ds.features[0].label.length() == 6.0);
}

TEST_CASE("lossy and multi-part inputs") {
  const auto holes = load("hole.geojson");
  REQUIRE(holes.features.size() == 1);
  CHECK(holes.warnings.size() == 1);
  CHECK(std::get<Polygon>(holes.features[0].geometry).ring.size() >= 4);

  const auto multi = load("multipart.geojson");
  REQUIRE(multi.features.size() == 4);
  CHECK(multi.features[0].name == "isles#0");
  CHECK(multi.features[1].name == "isles#1");
  CHECK(multi.features[0].kind == FeatureKind::area);
  CHECK(multi.features[2].kind == FeatureKind::line);
  CHECK(multi.features[3].name == "canal#1");

  const auto labelled = load("label_property.geojson");
  REQUIRE(labelled.features.size() == 1);
  CHECK(labelled.features[0].label.text == "Summit");
  CHECK(labelled.features[0].name == "0");

  CHECK(load("empty.geojson").features.empty());
}

TEST_CASE("bad inputs raise typed errors") {
  CHECK_THROWS_AS(load("bad_single_vertex.geojson"), ParseError);
  CHECK_THROWS_AS(load("bad_missing_label.geojson"), MissingLabel);
  CHECK_THROWS_AS(load("bad_unsupported.geojson"), UnsupportedGeometry);
  CHECK_THROWS_AS(load("bad_malformed.geojson"), ParseError);
  CHECK_THROWS_AS(load("does_not_exist.geojson"), IoError);
  CHECK_THROWS_AS(parse_geojson("[1,2]"), ParseError);
  CHECK_THROWS_AS(
      parse_geojson(R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":null,"properties":{"name":"x"}}]})"),
      UnsupportedGeometry);
  CHECK_THROWS_AS(
      parse_geojson(
          R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Polygon","coordinates":[[[0,0],[1,1],[0,0]]]},"properties":{"name":"x"}}]})"),
      InvalidGeometry);
}

TEST_CASE("every good fixture loads and runs") {
  for (const char* name : {"tiny.geojson", "hole.geojson", "multipart.geojson", "label_property.geojson", "empty.geojson",
                           "shortcut10.geojson", "washington71.geojson", "dense320.geojson"}) {
    CAPTURE(name);
    const auto ds = load(name);
    for (const auto& f : ds.features) CHECK_NOTHROW(validate_feature(f));
    const auto run = quick_run(name);
    CHECK(run.report.rows.size() == ds.features.size());
  }
}

TEST_CASE("report round trip") {
  const auto run = quick_run("washington71.geojson");
  const auto& report = run.report;
  const std::string text = report_to_json(report);
  CHECK(text.back() == '\n');
  const auto back = report_from_json(text);
  CHECK(back == report);
  CHECK(report_to_json(back) == text);
  CHECK(canonical_json_text(text) == text);

  const auto path = temp_file("report.json");
  write_report(report, path);
  CHECK(read_text_file(path) == text);
  CHECK(read_report(path) == report);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(report_from_json("{}"), ParseError);
  CHECK_THROWS_AS(write_report(report, "/nonexistent_dir/x/report.json"), IoError);
}

TEST_CASE("report aggregates agree with rows") {
  const auto run = quick_run("dense320.geojson");
  const auto& r = run.report;
  std::size_t lf = 0, ll = 0, shortcuts = 0;
  for (const auto& row : r.rows) {
    lf += row.mu1 > 0;
    ll += row.label_conflicts;
    shortcuts += row.shortcut;
    CHECK(row.layer >= 1);
    CHECK(row.layer <= 3);
  }
  CHECK(ll % 2 == 0);
  CHECK(r.lf_conflict_count == lf);
  CHECK(r.ll_conflict_count == ll / 2);
  CHECK(r.shortcut_count == shortcuts);
  CHECK(r.feature_count == r.rows.size());
  CHECK(r.optimized_count + r.shortcut_count == r.feature_count);
  CHECK(r.after.lf_conflict_count == lf);
  CHECK(r.after.ll_conflict_count == ll / 2);
  CHECK(r.after.rho2 <= r.before.rho2 + 1e-6);
  CHECK(r.schema == "labelforge/1");
  CHECK_FALSE(r.wall_seconds);
}

TEST_CASE("repeated runs give identical reports") {
  CHECK(report_to_json(quick_run("dense320.geojson", 3).report) ==
        report_to_json(quick_run("dense320.geojson", 3).report));
}

TEST_CASE("canonical json") {
  CHECK(canonical_json_text(R"({"b":1.5,"a":[true,null,"x"],"c":-0.0})") ==
        "{\n  \"a\": [\n    true,\n    null,\n    \"x\"\n  ],\n  \"b\": 1.500000,\n  \"c\": 0.000000\n}\n");
  CHECK(canonical_json_text("{\"n\":3}") == "{\n  \"n\": 3\n}\n");
  CHECK_THROWS_AS(canonical_json_text("{"), ParseError);
}

TEST_CASE("svg output") {
  CHECK(svg_document({}, {}).find("</svg>") != std::string::npos);

  std::vector<Feature> fs{lf_test::make_point(0, 0, 0, "a&b")};
  Placement pl;
  pl.labels.push_back({make_box({3, 0}, 3, 2)});
  pl.optimized.push_back(true);
  std::string svg = svg_document(fs, pl);
  CHECK(count(svg, "<circle") == 1);
  CHECK(count(svg, "<rect") == 1);
  CHECK(count(svg, "<text") == 1);
  CHECK(svg.find("a&amp;b") != std::string::npos);
  CHECK(svg.find("conflict\"") == std::string::npos);

  fs.push_back(lf_test::make_line(1, {{3, -5}, {3, 5}}, "l"));
  pl.labels.push_back({make_box({50, 50}, 1, 2)});
  pl.optimized.push_back(true);
  svg = svg_document(fs, pl);
  CHECK(count(svg, "class=\"box conflict\"") == 1);
  CHECK(count(svg, "<path class=\"line\"") == 1);

  const auto run = quick_run("tiny.geojson");
  const auto path = temp_file("tiny.svg");
  render_svg(load("tiny.geojson"), run.sliding.placement, path);
  const auto text = read_text_file(path);
  CHECK(count(text, "<g ") == 3);
  std::filesystem::remove(path);
}
