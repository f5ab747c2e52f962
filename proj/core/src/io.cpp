#include "labelforge/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "labelforge/errors.hpp"

namespace labelforge {
namespace {

using nlohmann::json;

double round6(double x) {
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // drops the sign of -0
}

void emit(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {  // std::map storage: keys already sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + json(key).dump() + ": ";
        emit(value, out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        emit(j[i], out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", round6(v));
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

std::string canonical(const json& j) {
  std::string out;
  emit(j, out, 0);
  out += '\n';
  return out;
}

Point2D read_position(const json& coords) {
  if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() || !coords[1].is_number()) {
    throw ParseError("coordinate must be an array of at least two numbers");
  }
  return {coords[0].get<double>(), coords[1].get<double>()};
}

std::vector<Point2D> read_positions(const json& coords) {
  if (!coords.is_array()) throw ParseError("coordinates must be an array");
  std::vector<Point2D> out;
  out.reserve(coords.size());
  for (const auto& c : coords) out.push_back(read_position(c));
  return out;
}

Polyline read_line(const json& coords) {
  auto vertices = read_positions(coords);
  if (vertices.size() < 2) throw ParseError("LineString needs at least two positions");
  return make_polyline(std::move(vertices));
}

Polygon read_polygon(const json& rings, const std::string& name, std::vector<std::string>& warnings) {
  if (!rings.is_array() || rings.empty()) throw ParseError("Polygon needs at least one ring");
  if (rings.size() > 1) {
    warnings.push_back("feature " + name + ": dropped " + std::to_string(rings.size() - 1) + " hole(s)");
  }
  return make_polygon(read_positions(rings[0]));
}

std::string source_id(const json& feature, std::size_t index) {
  const json* id = nullptr;
  if (feature.contains("id")) {
    id = &feature["id"];
  } else if (feature.contains("properties") && feature["properties"].is_object() &&
             feature["properties"].contains("id")) {
    id = &feature["properties"]["id"];
  }
  if (id == nullptr || id->is_null()) return std::to_string(index);
  return id->is_string() ? id->get<std::string>() : id->dump();
}

double size_property(const json& props, const char* key, double fallback) {
  if (!props.is_object() || !props.contains(key) || props[key].is_null()) return fallback;
  if (!props[key].is_number()) throw ParseError(std::string("property ") + key + " must be a number");
  return props[key].get<double>();
}

std::string label_text(const json& props, const std::string& name) {
  for (const char* key : {"label", "name"}) {
    if (props.is_object() && props.contains(key) && !props[key].is_null()) {
      const json& v = props[key];
      return v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  throw MissingLabel("feature " + name + " has neither a \"label\" nor a \"name\" property");
}

json box_json(const LabelBox& b) {
  return {{"cx", b.center.x}, {"cy", b.center.y}, {"length", b.length}, {"height", b.height}, {"angle", b.angle}};
}

LabelBox box_from(const json& j) {
  return {{j.at("cx").get<double>(), j.at("cy").get<double>()}, j.at("length").get<double>(),
          j.at("height").get<double>(), j.at("angle").get<double>()};
}

json breakdown_json(const ScoreBreakdown& s) {
  return {{"s1", s.s1},
          {"s2", s.s2},
          {"s3", s.s3},
          {"s4", s.s4},
          {"rho2", s.rho2},
          {"fitness", s.fitness},
          {"ll_conflict_count", s.ll_conflict_count},
          {"lf_conflict_count", s.lf_conflict_count}};
}

ScoreBreakdown breakdown_from(const json& j) {
  ScoreBreakdown s;
  s.s1 = j.at("s1").get<double>();
  s.s2 = j.at("s2").get<double>();
  s.s3 = j.at("s3").get<double>();
  s.s4 = j.at("s4").get<double>();
  s.rho2 = j.at("rho2").get<double>();
  s.fitness = j.at("fitness").get<double>();
  s.ll_conflict_count = j.at("ll_conflict_count").get<std::size_t>();
  s.lf_conflict_count = j.at("lf_conflict_count").get<std::size_t>();
  return s;
}

FeatureKind kind_from(const std::string& s) {
  if (s == "point") return FeatureKind::point;
  if (s == "line") return FeatureKind::line;
  if (s == "area") return FeatureKind::area;
  throw ParseError("unknown feature kind '" + s + "'");
}

void quantize(ScoreBreakdown& s) {
  for (double* v : {&s.s1, &s.s2, &s.s3, &s.s4, &s.rho2, &s.fitness}) *v = round6(*v);
}

}  // namespace

std::string canonical_json_text(std::string_view json_text) {
  try {
    return canonical(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Dataset parse_geojson(std::string_view text, const ReadOptions& options, std::string source_path) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError("malformed GeoJSON: " + std::string(e.what()));
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw ParseError("expected a GeoJSON FeatureCollection");
  }

  Dataset out;
  out.source_path = std::move(source_path);
  std::size_t index = 0;
  for (const json& f : doc["features"]) {
    const std::string name = source_id(f, index++);
    if (!f.is_object() || f.value("type", "") != "Feature") throw ParseError("entry " + name + " is not a Feature");
    const json props = f.contains("properties") ? f["properties"] : json::object();
    if (!f.contains("geometry") || !f["geometry"].is_object()) {
      throw UnsupportedGeometry("feature " + name + " has no geometry");
    }
    const json& g = f["geometry"];
    const std::string type = g.value("type", "");
    if (!g.contains("coordinates")) throw ParseError("feature " + name + " geometry has no coordinates");
    const json& coords = g["coordinates"];

    LabelSpec label{label_text(props, name), size_property(props, "label_char_width", options.default_char_width),
                    size_property(props, "label_height", options.default_label_height)};

    std::vector<std::pair<FeatureKind, Geometry>> parts;
    try {
      if (type == "Point") {
        parts.emplace_back(FeatureKind::point, read_position(coords));
      } else if (type == "LineString") {
        parts.emplace_back(FeatureKind::line, read_line(coords));
      } else if (type == "Polygon") {
        parts.emplace_back(FeatureKind::area, read_polygon(coords, name, out.warnings));
      } else if (type == "MultiLineString") {
        if (!coords.is_array()) throw ParseError("MultiLineString coordinates must be an array");
        for (const auto& part : coords) parts.emplace_back(FeatureKind::line, read_line(part));
      } else if (type == "MultiPolygon") {
        if (!coords.is_array()) throw ParseError("MultiPolygon coordinates must be an array");
        for (const auto& part : coords) parts.emplace_back(FeatureKind::area, read_polygon(part, name, out.warnings));
      } else {
        throw UnsupportedGeometry("feature " + name + " has unsupported geometry type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError("feature " + name + ": " + e.what());
    } catch (const InvalidGeometry& e) {
      throw InvalidGeometry("feature " + name + ": " + e.what());
    }

    for (std::size_t p = 0; p < parts.size(); ++p) {
      Feature feature;
      feature.id = static_cast<std::int64_t>(out.features.size());
      feature.kind = parts[p].first;
      feature.geometry = std::move(parts[p].second);
      feature.label = label;
      feature.name = parts.size() > 1 || type.starts_with("Multi") ? name + "#" + std::to_string(p) : name;
      validate_feature(feature);
      out.features.push_back(std::move(feature));
    }
  }

  for (std::size_t i = 0; i < out.features.size(); ++i) {
    const Aabb b = bounds(out.features[i].geometry);
    if (i == 0) {
      out.bounds = b;
    } else {
      out.bounds.extend(b);
    }
  }
  return out;
}

Dataset read_geojson(const std::filesystem::path& path, const ReadOptions& options) {
  return parse_geojson(read_text_file(path), options, path.string());
}

PlacementReport make_report(const LabelingProblem& problem, const Placement& placement) {
  const auto& features = problem.features;
  const FeatureIndex index(features);
  PlacementReport r;
  r.feature_count = features.size();
  r.optimized_count = problem.full.size();
  r.shortcut_count = features.size() - problem.full.size();
  std::vector<Aabb> boxes;
  for (const auto& c : placement.labels) boxes.push_back(bounds(c.box));
  for (std::size_t i = 0; i < features.size(); ++i) {
    const CandidatePosition& c = placement.labels[i];
    ReportRow row;
    row.id = features[i].id;
    row.name = features[i].name;
    row.kind = features[i].kind;
    row.box = c.box;
    row.layer = c.layer;
    row.mu1 = index.penalty(c.box, i);
    row.mu2 = c.ambiguity;
    row.priority = c.priority;
    row.shortcut = !placement.optimized[i];
    for (std::size_t j = 0; j < features.size(); ++j) {
      if (j != i && boxes[i].overlaps(boxes[j]) && boxes_intersect(c.box, placement.labels[j].box)) {
        ++row.label_conflicts;
      }
    }
    if (row.mu1 > 0) ++r.lf_conflict_count;
    r.ll_conflict_count += row.label_conflicts;
    r.rows.push_back(std::move(row));
  }
  r.ll_conflict_count /= 2;
  return r;
}

void quantize(PlacementReport& r) {
  for (auto& row : r.rows) {
    for (double* v : {&row.box.center.x, &row.box.center.y, &row.box.length, &row.box.height, &row.box.angle,
                      &row.mu2, &row.priority}) {
      *v = round6(*v);
    }
  }
  quantize(r.before);
  quantize(r.after);
  for (double* v : {&r.sliding.score_before, &r.sliding.score_after, &r.sliding.fitness_before,
                    &r.sliding.fitness_after, &r.lowest_score}) {
    *v = round6(*v);
  }
  if (r.wall_seconds) r.wall_seconds = round6(*r.wall_seconds);
}

std::string report_to_json(const PlacementReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"id", row.id},
                    {"name", row.name},
                    {"kind", std::string(to_string(row.kind))},
                    {"box", box_json(row.box)},
                    {"layer", row.layer},
                    {"mu1", row.mu1},
                    {"mu2", row.mu2},
                    {"priority", row.priority},
                    {"shortcut", row.shortcut},
                    {"label_conflicts", row.label_conflicts}});
  }
  json sliding = {{"initial_conflicts", r.sliding.initial_conflicts}, {"eliminated", r.sliding.eliminated},
                  {"better", r.sliding.better},                       {"score_before", r.sliding.score_before},
                  {"score_after", r.sliding.score_after},             {"fitness_before", r.sliding.fitness_before},
                  {"fitness_after", r.sliding.fitness_after}};
  json aggregate = {{"before_sliding", breakdown_json(r.before)},
                    {"after_sliding", breakdown_json(r.after)},
                    {"sliding", sliding},
                    {"lowest_score", r.lowest_score},
                    {"feature_count", r.feature_count},
                    {"optimized_count", r.optimized_count},
                    {"shortcut_count", r.shortcut_count},
                    {"lf_conflict_count", r.lf_conflict_count},
                    {"ll_conflict_count", r.ll_conflict_count},
                    {"iterations", r.iterations},
                    {"workers", r.workers},
                    {"seed", r.seed}};
  if (r.wall_seconds) aggregate["wall_seconds"] = *r.wall_seconds;
  json doc = {{"schema", r.schema}, {"input", r.input}, {"aggregate", aggregate}, {"features", rows}};
  return canonical(doc);
}

PlacementReport report_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    PlacementReport r;
    r.schema = doc.at("schema").get<std::string>();
    if (r.schema != "labelforge/1") throw ParseError("unsupported report schema '" + r.schema + "'");
    r.input = doc.at("input").get<std::string>();
    const json& a = doc.at("aggregate");
    r.before = breakdown_from(a.at("before_sliding"));
    r.after = breakdown_from(a.at("after_sliding"));
    const json& s = a.at("sliding");
    r.sliding.initial_conflicts = s.at("initial_conflicts").get<std::size_t>();
    r.sliding.eliminated = s.at("eliminated").get<std::size_t>();
    r.sliding.better = s.at("better").get<std::size_t>();
    r.sliding.score_before = s.at("score_before").get<double>();
    r.sliding.score_after = s.at("score_after").get<double>();
    r.sliding.fitness_before = s.at("fitness_before").get<double>();
    r.sliding.fitness_after = s.at("fitness_after").get<double>();
    r.lowest_score = a.at("lowest_score").get<double>();
    r.feature_count = a.at("feature_count").get<std::size_t>();
    r.optimized_count = a.at("optimized_count").get<std::size_t>();
    r.shortcut_count = a.at("shortcut_count").get<std::size_t>();
    r.lf_conflict_count = a.at("lf_conflict_count").get<std::size_t>();
    r.ll_conflict_count = a.at("ll_conflict_count").get<std::size_t>();
    r.iterations = a.at("iterations").get<std::size_t>();
    r.workers = a.at("workers").get<std::size_t>();
    r.seed = a.at("seed").get<std::uint64_t>();
    if (a.contains("wall_seconds")) r.wall_seconds = a.at("wall_seconds").get<double>();
    for (const json& j : doc.at("features")) {
      ReportRow row;
      row.id = j.at("id").get<std::int64_t>();
      row.name = j.at("name").get<std::string>();
      row.kind = kind_from(j.at("kind").get<std::string>());
      row.box = box_from(j.at("box"));
      row.layer = j.at("layer").get<int>();
      row.mu1 = j.at("mu1").get<int>();
      row.mu2 = j.at("mu2").get<double>();
      row.priority = j.at("priority").get<double>();
      row.shortcut = j.at("shortcut").get<bool>();
      row.label_conflicts = j.at("label_conflicts").get<std::size_t>();
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

void write_report(const PlacementReport& report, const std::filesystem::path& path) {
  write_text_file(path, report_to_json(report));
}

PlacementReport read_report(const std::filesystem::path& path) { return report_from_json(read_text_file(path)); }

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace labelforge
