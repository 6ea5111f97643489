#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrplan/grid_map.hpp"
#include "mrplan/instance.hpp"
#include "mrplan/plan.hpp"
#include "mrplan/schedule.hpp"
#include "mrplan/simulator.hpp"
#include "mrplan/stn.hpp"

namespace mrplan {

// A parsed instance document: an explicit graph (vertices: id, x, y; edges:
// u, v, length[, speed_limit]) or an inline grid map, plus either `robots`
// (fixed targets) or `teams` (exchangeable targets). Vertex references in
// robots/teams/highways are declared ids for explicit graphs, and dense
// indices, "x,y" names, or [x, y] cell pairs for grids.
struct InstanceDoc {
  Graph graph;
  std::optional<GridMap> grid;  // set when the graph came from a grid
  std::vector<RobotSpec> robots;
  std::vector<Team> teams;

  bool is_tapf() const { return !teams.empty(); }
  MapfInstance mapf() const;  // throws InputError on the wrong form
  TapfInstance tapf() const;
};

InstanceDoc parse_instance(const nlohmann::json& doc);

// Resolves one vertex reference (see InstanceDoc) against the parsed graph.
VertexId resolve_vertex(const nlohmann::json& ref, const Graph& graph,
                        bool from_grid);

// Plans serialize with vertex names so the files read naturally and survive
// graph re-indexing; parsing resolves the names against the given graph.
nlohmann::json plan_to_json(const DiscretePlan& plan, const Graph& graph);
DiscretePlan plan_from_json(const nlohmann::json& doc, const Graph& graph);

// Schedule files are exactly one array per robot of {x, y, t} waypoints.
nlohmann::json schedule_to_json(const Schedule& schedule);

nlohmann::json metrics_to_json(const Metrics& metrics);

// One JSON object per line: {t, robot, x, y, waypoint_index, delayed}.
std::string trajectory_to_jsonl(const std::vector<TrajectoryRow>& rows);

// Textual STN arc list for diffing: one "from to lo hi" line per arc,
// unbounded uppers spelled "inf".
std::string stn_dump(const Stn& stn);

}  // namespace mrplan
