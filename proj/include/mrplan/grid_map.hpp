#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mrplan/graph.hpp"

namespace mrplan {

// Octile grid map document:
//   type octile
//   height H
//   width W
//   map
//   <H rows of W cells>
// '.' is passable, '@' and 'T' are blocked. serialize() is canonical and
// emits '@' for blocked cells, so parse(serialize(m)) == m and, for
// documents that only use '.'/'@', serialize(parse(doc)) == doc.
struct GridMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;  // row-major, 1 = passable

  static GridMap parse(std::string_view text);
  std::string serialize() const;

  bool passable(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height &&
           cells[static_cast<size_t>(y) * width + x] != 0;
  }

  // One vertex per passable cell at its center (x+0.5, y+0.5), named "x,y",
  // unit-length 4-neighbor edges. Vertices are emitted row-major.
  Graph to_graph() const;

  bool operator==(const GridMap& other) const = default;
};

Graph parse_grid_map(std::string_view text);

}  // namespace mrplan
