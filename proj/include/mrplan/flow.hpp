#pragma once

#include <vector>

#include "mrplan/instance.hpp"

namespace mrplan {

// Team-wide prohibition used by the team conflict tree: either "no robot of
// this team at vertex v at timestep t" or "no robot of this team arrives at
// v from `from` at timestep t".
struct TeamProhibition {
  enum class Kind { vertex, edge };
  Kind kind = Kind::vertex;
  VertexId v = kNoVertex;
  VertexId from = kNoVertex;
  int timestep = 0;
};

using TeamConstraintSet = std::vector<TeamProhibition>;

struct TeamFlowResult {
  bool feasible = false;
  // paths[i] belongs to team.starts[i]; each has exactly T+1 entries.
  std::vector<std::vector<VertexId>> paths;
};

// Routes one team of exchangeable robots so that every robot is on a target
// at timestep T, via min-cost max-flow on a time-expanded network: per
// (vertex, timestep) occupancy capacity 1 through a split node, and one
// 2-in/2-out gadget with a single unit-capacity internal arc per undirected
// edge per timestep (so an edge carries at most one robot per step, which
// forbids swaps). Movement arcs cost 1, everything else 0, so among feasible
// routings one with fewest moves is returned, deterministically.
TeamFlowResult plan_team_flow(const Graph& graph, const Team& team, int T,
                              const TeamConstraintSet& constraints);

}  // namespace mrplan
