#include <algorithm>
#include <cstdio>
#include <numbers>
#include <string>

#include "labelforge/io.hpp"

namespace labelforge {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// SVG's y axis points down; map coordinates are flipped on output.
std::string xy(Point2D p) { return num(p.x) + "," + num(-p.y); }

std::string path_data(const std::vector<Point2D>& pts, bool close) {
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i) d += (i ? " L" : "M") + xy(pts[i]);
  if (close) d += " Z";
  return d;
}

}  // namespace

std::string svg_document(std::span<const Feature> features, const Placement& placement) {
  std::optional<Aabb> extent;
  auto grow = [&](const Aabb& b) {
    if (extent) {
      extent->extend(b);
    } else {
      extent = b;
    }
  };
  for (const auto& f : features) grow(bounds(f.geometry));
  for (const auto& c : placement.labels) grow(bounds(c.box));

  Aabb view = extent.value_or(Aabb{0.0, 0.0, 1.0, 1.0});
  const double span = std::max({view.width(), view.height(), 1e-9});
  view = view.expanded(0.05 * span);

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + num(view.min_x) + " " +
         num(-view.max_y) + " " + num(view.width()) + " " + num(view.height()) + "\">\n";
  if (features.empty() && placement.labels.empty()) {
    out += "</svg>\n";
    return out;
  }

  const double stroke = 0.002 * span;
  out += "<style>\n";
  out += ".area{fill:#e8efe0;stroke:#7a9a68;stroke-width:" + num(stroke) + "}\n";
  out += ".line{fill:none;stroke:#4a6fa5;stroke-width:" + num(2 * stroke) + "}\n";
  out += ".point{fill:#333}\n";
  out += ".box{fill:none;stroke:#999;stroke-width:" + num(stroke) + "}\n";
  out += ".box.conflict{stroke:#d0312d;stroke-width:" + num(2 * stroke) + "}\n";
  out += "text{text-anchor:middle;dominant-baseline:central;font-family:sans-serif}\n";
  out += "</style>\n";

  for (const auto& f : features) {
    if (const auto* p = std::get_if<Point2D>(&f.geometry)) {
      out += "<circle class=\"point\" cx=\"" + num(p->x) + "\" cy=\"" + num(-p->y) + "\" r=\"" + num(3 * stroke) +
             "\"/>\n";
    } else if (const auto* l = std::get_if<Polyline>(&f.geometry)) {
      out += "<path class=\"line\" d=\"" + path_data(l->vertices, false) + "\"/>\n";
    } else if (const auto* a = std::get_if<Polygon>(&f.geometry)) {
      std::vector<Point2D> ring(a->ring.begin(), a->ring.end() - 1);
      out += "<path class=\"area\" d=\"" + path_data(ring, true) + "\"/>\n";
    }
  }

  const FeatureIndex index(features);
  const std::size_t n = std::min(features.size(), placement.labels.size());
  for (std::size_t i = 0; i < n; ++i) {
    const LabelBox& b = placement.labels[i].box;
    const bool conflict = index.penalty(b, i) > 0;
    const double deg = -b.angle * 180.0 / std::numbers::pi;
    const std::string transform = "translate(" + xy(b.center) + ") rotate(" + num(deg) + ")";
    out += "<g transform=\"" + transform + "\">";
    out += "<rect class=\"box" + std::string(conflict ? " conflict" : "") + "\" x=\"" + num(-b.length / 2) +
           "\" y=\"" + num(-b.height / 2) + "\" width=\"" + num(b.length) + "\" height=\"" + num(b.height) + "\"/>";
    out += "<text font-size=\"" + num(0.8 * b.height) + "\">" + xml_escape(features[i].label.text) + "</text>";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

void render_svg(const Dataset& dataset, const Placement& placement, const std::filesystem::path& path) {
  write_text_file(path, svg_document(dataset.features, placement));
}

}  // namespace labelforge
