#pragma once

#include <vector>

#include "mrplan/graph.hpp"
#include "mrplan/plan.hpp"

namespace mrplan {

// The event "robot `robot` arrives at `vertex` at plan timestep `timestep`".
struct TpgNode {
  RobotId robot = 0;  // index into the plan's robot list
  int timestep = 0;
  VertexId vertex = kNoVertex;
};

// Event DAG of a conflict-free plan. Each robot's arrival events form a
// chain (waits collapsed into the node they extend); for each vertex, every
// pair of consecutive occupants j-then-k contributes one inter-robot arc
// from j's departure event (its arrival at the next vertex) to k's arrival.
// Arcs between longer-separated occupants are implied transitively and
// omitted, as are same-robot revisits (implied by the chain).
struct Tpg {
  std::vector<TpgNode> nodes;
  std::vector<std::vector<int>> chains;  // per robot, node ids in chain order

  struct InterArc {
    int from = 0;
    int to = 0;
    VertexId vertex = kNoVertex;  // the shared vertex being handed over
  };
  std::vector<InterArc> inter;
};

// Throws InputError if the plan has conflicts or is structurally invalid.
Tpg build_tpg(const DiscretePlan& plan, const Graph& graph);

// The safety distance exceeds half the length of an edge that must carry a
// marker; carries the offending edge.
class DeltaBoundError : public InputError {
 public:
  DeltaBoundError(const std::string& what, VertexId u, VertexId v, double length)
      : InputError(what), u(u), v(v), length(length) {}
  VertexId u;
  VertexId v;
  double length;
};

// One event of the augmented TPG. Markers guard a handover vertex: the
// predecessor's "cleared by delta" point just past it, the successor's
// "within delta" point just before it.
struct EventNode {
  enum class Kind { arrival, cleared, within };
  Kind kind = Kind::arrival;
  RobotId robot = 0;
  VertexId vertex = kNoVertex;  // arrival: the vertex; marker: the guarded vertex
  Vec2 pos;
  int timestep = -1;        // plan timestep for arrivals, -1 for markers
  double turn_angle = 0.0;  // radians rotated in place before leaving (arrivals)
};

// Geometry of one chain segment (between consecutive chain events): its
// arc length and the speed limit inherited from the underlying edge.
struct ChainSeg {
  double length = 0.0;
  double speed_limit = 0.0;  // <= 0 means unlimited
};

struct AugmentedTpg {
  double delta = 0.0;
  std::vector<EventNode> nodes;
  std::vector<std::vector<int>> chains;      // per robot, node ids in order
  std::vector<std::vector<ChainSeg>> segs;   // segs[r][i] joins chain nodes i, i+1

  struct InterArc {
    int from = 0;
    int to = 0;
    VertexId vertex = kNoVertex;
  };
  std::vector<InterArc> inter;
};

// Inserts the delta markers and re-targets every inter-robot arc to run
// marker-to-marker. delta = 0 adds no nodes (the arcs connect the original
// arrival events), so the structure is isomorphic to the input. Throws
// DeltaBoundError if delta exceeds half the length of a marker-carrying
// edge.
AugmentedTpg augment_tpg(const Tpg& tpg, double delta, const Graph& graph);

// Largest admissible delta: half the minimum length over marker-carrying
// edges (half the minimum over all edges when no arc needs markers).
double max_delta(const Tpg& tpg, const Graph& graph);

}  // namespace mrplan
