#pragma once

#include <chrono>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mrplan/constraints.hpp"

namespace mrplan {

// Occupancies of the other robots' current paths; used by the focal variant
// to count prospective conflicts. Robots park on their final vertex forever.
class ConflictAvoidanceTable {
 public:
  void add_path(const std::vector<VertexId>& seq);
  int vertex_hits(VertexId v, int t) const;
  int swap_hits(VertexId from, VertexId to, int t) const;
  bool empty() const { return paths_ == 0; }

 private:
  static std::uint64_t vkey(VertexId v, int t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 28) ^
           static_cast<std::uint32_t>(t);
  }
  static std::uint64_t mkey(VertexId from, VertexId to, int t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 40) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(to)) << 20) ^
           static_cast<std::uint32_t>(t);
  }
  std::unordered_map<std::uint64_t, int> vertex_;
  std::unordered_map<std::uint64_t, int> moves_;
  std::unordered_map<VertexId, std::vector<int>> parked_;  // vertex -> settle times
  int paths_ = 0;
};

struct AstarOptions {
  CostModel cost;
  int horizon = 0;  // inclusive cap on timesteps
  // focal search: expand from {f <= focal_w * f_min}, fewest conflicts first
  double focal_w = 1.0;
  const ConflictAvoidanceTable* cat = nullptr;
  const std::vector<int>* heuristic = nullptr;  // BFS hops to target, optional cache
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct AstarResult {
  bool found = false;
  bool timed_out = false;
  std::vector<VertexId> path;  // indexed by timestep; ends when the robot settles
  double cost = 0.0;           // sum of action costs (trailing target waits excluded)
  double f_min = 0.0;          // lower bound on the constrained optimum
};

// Space-time A* over (vertex, timestep) with unit timesteps. Tie-breaking is
// lexicographic: smaller f, then (with an active highway cost model) fewer
// non-highway-direction moves, then smaller timestep, smaller vertex id, and
// wait before move. The goal must be held through every later vertex
// constraint on the target, so arrival is only accepted after the last one.
AstarResult space_time_astar(const Graph& g, VertexId start, VertexId target,
                             const ConstraintSet& constraints, const AstarOptions& opt);

}  // namespace mrplan
