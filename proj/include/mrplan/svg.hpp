#pragma once

#include <string>
#include <vector>

#include "mrplan/graph.hpp"
#include "mrplan/simulator.hpp"

namespace mrplan {

// Renders the map (edges as lines, vertices as dots) with the executed
// trajectories drawn over it: exactly one <path> element per robot, vertex
// ordering by time. Output is deterministic for identical inputs.
std::string render_svg(const Graph& graph, const std::vector<TrajectoryRow>& log);

}  // namespace mrplan
