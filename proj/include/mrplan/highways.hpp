#pragma once

#include <unordered_set>
#include <vector>

#include "mrplan/instance.hpp"

namespace mrplan {

// A set of directed edge preferences. At most one direction per undirected
// edge; every entry must be an existing edge.
class HighwaySet {
 public:
  void add(const Graph& g, VertexId from, VertexId to);
  bool contains(VertexId from, VertexId to) const;
  bool against(VertexId from, VertexId to) const { return contains(to, from); }
  bool empty() const { return arcs_.empty(); }
  size_t size() const { return arcs_.size(); }
  const std::vector<std::pair<VertexId, VertexId>>& arcs() const { return listed_; }

 private:
  static std::uint64_t key(VertexId from, VertexId to) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
           static_cast<std::uint32_t>(to);
  }
  std::unordered_set<std::uint64_t> arcs_;
  std::vector<std::pair<VertexId, VertexId>> listed_;
};

// Derives highway directions from the robots' independent shortest paths
// (deterministic tie-breaking: walk from the start picking the neighbor with
// the smallest BFS distance to the target, smallest vertex id on ties). Each
// traversed undirected edge contributes its majority direction; exact ties
// are omitted. Teams are first assigned by the bottleneck assignment also
// used for makespan lower bounds.
HighwaySet suggest_highways(const MapfInstance& instance);
HighwaySet suggest_highways(const TapfInstance& instance);

// Deterministic independent shortest path used by the suggestion rule.
std::vector<VertexId> deterministic_shortest_path(const Graph& g, VertexId start,
                                                  VertexId target);

}  // namespace mrplan
