#pragma once

#include <vector>

#include "mrplan/graph.hpp"
#include "mrplan/plan.hpp"

namespace mrplan {

// A vertex conflict: robots a and b occupy `v` at `timestep`.
// An edge conflict: a traverses u->v while b traverses v->u during
// (timestep-1, timestep], i.e. they swap. Following a robot into the vertex
// it just vacated is not a conflict.
struct Conflict {
  enum class Kind { vertex, edge };
  Kind kind = Kind::vertex;
  RobotId a = 0;  // a < b
  RobotId b = 0;
  int timestep = 0;
  VertexId v = kNoVertex;  // vertex kind: the shared vertex; edge kind: a's arrival
  VertexId u = kNoVertex;  // edge kind: a's departure vertex (a moved u->v)
};

// All pairwise conflicts, ordered by (timestep, robot pair, vertex before
// edge). Throws InputError on structurally invalid plans (non-adjacent
// moves, missing vertices, ragged lengths).
std::vector<Conflict> detect_conflicts(const DiscretePlan& plan, const Graph& graph);

}  // namespace mrplan
