#pragma once

#include <unordered_set>
#include <vector>

#include "mrplan/graph.hpp"
#include "mrplan/highways.hpp"

namespace mrplan {

// Branching unit of the conflict tree. A vertex constraint forbids one robot
// from occupying `v` at `timestep`; an edge constraint forbids it from
// arriving at `v` from `from` at `timestep`.
struct SpaceTimeConstraint {
  enum class Kind { vertex, edge };
  Kind kind = Kind::vertex;
  RobotId robot = 0;
  VertexId v = kNoVertex;
  VertexId from = kNoVertex;  // edge kind only
  int timestep = 0;
};

// Single-robot view used by the low-level search. Because a robot parks on
// its target forever, the goal may only be declared at a timestep after the
// last vertex constraint on the target.
class ConstraintSet {
 public:
  void add(const SpaceTimeConstraint& c);

  bool vertex_forbidden(VertexId v, int t) const;
  bool edge_forbidden(VertexId from, VertexId to, int t) const;
  int earliest_settle(VertexId target) const;

 private:
  static std::uint64_t vkey(VertexId v, int t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 28) ^
           static_cast<std::uint32_t>(t);
  }
  static std::uint64_t ekey(VertexId from, VertexId to, int t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 40) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(to)) << 20) ^
           static_cast<std::uint32_t>(t);
  }
  std::unordered_set<std::uint64_t> vertex_;
  std::unordered_set<std::uint64_t> edge_;
  std::vector<std::pair<VertexId, int>> vertex_listed_;
};

// Action costs for the low-level search. Every wait and move costs 1 unless
// the move runs against a highway direction, which costs w instead.
struct CostModel {
  const HighwaySet* highways = nullptr;
  double against_highway_cost = 1.0;

  double move_cost(VertexId from, VertexId to) const {
    if (highways && highways->against(from, to)) return against_highway_cost;
    return 1.0;
  }
  double wait_cost() const { return 1.0; }
  bool highway_active() const { return highways != nullptr && !highways->empty(); }
  // Tie-break metric: moves that are not along a highway direction.
  bool off_highway_move(VertexId from, VertexId to) const {
    return highway_active() && !highways->contains(from, to);
  }
};

}  // namespace mrplan
