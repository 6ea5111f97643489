#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrplan/common.hpp"

namespace mrplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Vec2 a, Vec2 b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Edge {
  VertexId u = kNoVertex;
  VertexId v = kNoVertex;
  double length = 1.0;
  std::optional<double> speed_limit;  // m/s, caps every robot on this edge
};

// Undirected graph with 2D vertex positions. Vertices are dense indices;
// names are kept for I/O. Adjacency lists are sorted ascending so every
// iteration order in the planners is deterministic.
class Graph {
 public:
  VertexId add_vertex(const std::string& name, Vec2 pos);
  void add_edge(VertexId u, VertexId v, double length,
                std::optional<double> speed_limit = std::nullopt);

  int vertex_count() const { return static_cast<int>(positions_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  Vec2 pos(VertexId v) const { return positions_[static_cast<size_t>(v)]; }
  const std::string& name(VertexId v) const {
    return names_[static_cast<size_t>(v)];
  }
  std::optional<VertexId> find(const std::string& name) const;

  const std::vector<VertexId>& neighbors(VertexId v) const {
    return adjacency_[static_cast<size_t>(v)];
  }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_edge(VertexId u, VertexId v) const { return edge(u, v) != nullptr; }
  const Edge* edge(VertexId u, VertexId v) const;
  double edge_length(VertexId u, VertexId v) const;

 private:
  void check_vertex(VertexId v, const char* what) const;

  std::vector<Vec2> positions_;
  std::vector<std::string> names_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, VertexId> by_name_;
  std::unordered_map<std::uint64_t, int> edge_index_;  // key(u,v) -> edges_
};

// BFS hop distances from source over the unweighted graph; unreachable
// vertices get -1. Shared by planners and oracles-of-one-robot cases.
std::vector<int> bfs_hops(const Graph& g, VertexId source);

}  // namespace mrplan
