#include "mrplan/grid_map.hpp"

#include <charconv>

namespace mrplan {

namespace {

std::string_view next_line(std::string_view& rest) {
  size_t nl = rest.find('\n');
  std::string_view line = rest.substr(0, nl);
  rest = (nl == std::string_view::npos) ? std::string_view{} : rest.substr(nl + 1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

int parse_header_int(std::string_view line, std::string_view key) {
  if (line.substr(0, key.size()) != key || line.size() <= key.size() ||
      line[key.size()] != ' ') {
    throw InputError("grid map: expected '" + std::string(key) + " <n>', got '" +
                     std::string(line) + "'");
  }
  std::string_view num = line.substr(key.size() + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
  if (ec != std::errc{} || ptr != num.data() + num.size() || value <= 0) {
    throw InputError("grid map: bad " + std::string(key) + " value '" +
                     std::string(num) + "'");
  }
  return value;
}

}  // namespace

GridMap GridMap::parse(std::string_view text) {
  std::string_view rest = text;
  if (next_line(rest) != "type octile") {
    throw InputError("grid map: first line must be 'type octile'");
  }
  GridMap m;
  m.height = parse_header_int(next_line(rest), "height");
  m.width = parse_header_int(next_line(rest), "width");
  if (next_line(rest) != "map") {
    throw InputError("grid map: expected 'map' line after the header");
  }
  m.cells.reserve(static_cast<size_t>(m.width) * m.height);
  for (int y = 0; y < m.height; ++y) {
    std::string_view row = next_line(rest);
    if (static_cast<int>(row.size()) != m.width) {
      throw InputError("grid map: row " + std::to_string(y) + " has width " +
                       std::to_string(row.size()) + ", expected " +
                       std::to_string(m.width));
    }
    for (char c : row) {
      if (c == '.') {
        m.cells.push_back(1);
      } else if (c == '@' || c == 'T') {
        m.cells.push_back(0);
      } else {
        throw InputError(std::string("grid map: unknown cell character '") + c + "'");
      }
    }
  }
  while (!rest.empty()) {
    if (!next_line(rest).empty()) {
      throw InputError("grid map: trailing content after the last row");
    }
  }
  bool any = false;
  for (auto c : m.cells) any = any || c;
  if (!any) throw InputError("grid map: no passable cells");
  return m;
}

std::string GridMap::serialize() const {
  std::string out = "type octile\nheight " + std::to_string(height) +
                    "\nwidth " + std::to_string(width) + "\nmap\n";
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out += passable(x, y) ? '.' : '@';
    }
    out += '\n';
  }
  return out;
}

Graph GridMap::to_graph() const {
  Graph g;
  std::vector<VertexId> ids(static_cast<size_t>(width) * height, kNoVertex);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!passable(x, y)) continue;
      ids[static_cast<size_t>(y) * width + x] = g.add_vertex(
          std::to_string(x) + "," + std::to_string(y), Vec2{x + 0.5, y + 0.5});
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      VertexId here = ids[static_cast<size_t>(y) * width + x];
      if (here == kNoVertex) continue;
      if (passable(x + 1, y)) {
        g.add_edge(here, ids[static_cast<size_t>(y) * width + x + 1], 1.0);
      }
      if (passable(x, y + 1)) {
        g.add_edge(here, ids[(static_cast<size_t>(y) + 1) * width + x], 1.0);
      }
    }
  }
  return g;
}

Graph parse_grid_map(std::string_view text) { return GridMap::parse(text).to_graph(); }

}  // namespace mrplan
