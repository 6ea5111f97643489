#include "mrplan/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace mrplan {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#17becf", "#e377c2", "#8c564b",
                          "#bcbd22", "#393b79", "#637939", "#8c6d31"};
constexpr size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Graph& graph, const std::vector<TrajectoryRow>& log) {
  double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
  bool first = true;
  auto grow = [&](double x, double y) {
    if (first) {
      min_x = max_x = x;
      min_y = max_y = y;
      first = false;
      return;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  };
  for (VertexId v = 0; v < graph.vertex_count(); ++v) grow(graph.pos(v).x, graph.pos(v).y);
  for (const TrajectoryRow& r : log) grow(r.x, r.y);

  const double margin = 1.0;
  min_x -= margin;
  min_y -= margin;
  max_x += margin;
  max_y += margin;
  const double w = max_x - min_x;
  const double h = max_y - min_y;
  const double scale = std::min(60.0, 900.0 / std::max(w, h));
  const double px_w = w * scale;
  const double px_h = h * scale;
  // SVG y grows downward; flip so the map reads like the coordinates.
  auto sx = [&](double x) { return (x - min_x) * scale; };
  auto sy = [&](double y) { return (max_y - y) * scale; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(px_w)
      << "\" height=\"" << num(px_h) << "\" viewBox=\"0 0 " << num(px_w) << ' '
      << num(px_h) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (const Edge& e : graph.edges()) {
    const Vec2 a = graph.pos(e.u);
    const Vec2 b = graph.pos(e.v);
    out << "<line x1=\"" << num(sx(a.x)) << "\" y1=\"" << num(sy(a.y)) << "\" x2=\""
        << num(sx(b.x)) << "\" y2=\"" << num(sy(b.y))
        << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  }
  for (VertexId v = 0; v < graph.vertex_count(); ++v) {
    const Vec2 p = graph.pos(v);
    out << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y))
        << "\" r=\"2\" fill=\"#999999\"/>\n";
  }

  // Rows arrive tick-major; regroup by robot, preserving time order.
  std::map<int, std::vector<const TrajectoryRow*>> by_robot;
  for (const TrajectoryRow& r : log) by_robot[r.robot].push_back(&r);
  size_t color = 0;
  for (const auto& [robot, rows] : by_robot) {
    out << "<path fill=\"none\" stroke=\"" << kPalette[color % kPaletteSize]
        << "\" stroke-width=\"2\" stroke-opacity=\"0.85\" d=\"";
    for (size_t i = 0; i < rows.size(); ++i) {
      out << (i == 0 ? 'M' : 'L') << num(sx(rows[i]->x)) << ' ' << num(sy(rows[i]->y));
    }
    out << "\"><title>robot " << robot << "</title></path>\n";
    ++color;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace mrplan
