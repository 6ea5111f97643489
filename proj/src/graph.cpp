#include "mrplan/graph.hpp"

#include <algorithm>
#include <deque>

namespace mrplan {

namespace {

std::uint64_t edge_key(VertexId u, VertexId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

}  // namespace

VertexId Graph::add_vertex(const std::string& name, Vec2 pos) {
  if (!std::isfinite(pos.x) || !std::isfinite(pos.y)) {
    throw InputError("vertex '" + name + "' has a non-finite position");
  }
  std::string key = name.empty() ? std::to_string(positions_.size()) : name;
  if (by_name_.count(key)) {
    throw InputError("duplicate vertex id '" + key + "'");
  }
  VertexId id = static_cast<VertexId>(positions_.size());
  positions_.push_back(pos);
  names_.push_back(key);
  adjacency_.emplace_back();
  by_name_.emplace(std::move(key), id);
  return id;
}

void Graph::check_vertex(VertexId v, const char* what) const {
  if (v < 0 || v >= vertex_count()) {
    throw InputError(std::string("edge ") + what + " refers to a vertex that does not exist");
  }
}

void Graph::add_edge(VertexId u, VertexId v, double length,
                     std::optional<double> speed_limit) {
  check_vertex(u, "endpoint");
  check_vertex(v, "endpoint");
  if (u == v) {
    throw InputError("self-loop at vertex '" + name(u) + "' is not allowed");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InputError("edge " + name(u) + "-" + name(v) + " has non-positive length");
  }
  if (speed_limit && !(*speed_limit > 0.0)) {
    throw InputError("edge " + name(u) + "-" + name(v) + " has non-positive speed limit");
  }
  if (has_edge(u, v)) {
    throw InputError("duplicate edge " + name(u) + "-" + name(v));
  }
  edge_index_.emplace(edge_key(u, v), static_cast<int>(edges_.size()));
  edges_.push_back(Edge{u, v, length, speed_limit});
  auto& au = adjacency_[static_cast<size_t>(u)];
  au.insert(std::lower_bound(au.begin(), au.end(), v), v);
  auto& av = adjacency_[static_cast<size_t>(v)];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
}

std::optional<VertexId> Graph::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const Edge* Graph::edge(VertexId u, VertexId v) const {
  if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count()) return nullptr;
  auto it = edge_index_.find(edge_key(u, v));
  if (it == edge_index_.end()) return nullptr;
  return &edges_[static_cast<size_t>(it->second)];
}

double Graph::edge_length(VertexId u, VertexId v) const {
  const Edge* e = edge(u, v);
  if (!e) {
    throw InputError("no edge between '" + name(u) + "' and '" + name(v) + "'");
  }
  return e->length;
}

std::vector<int> bfs_hops(const Graph& g, VertexId source) {
  std::vector<int> dist(static_cast<size_t>(g.vertex_count()), -1);
  std::deque<VertexId> queue;
  dist[static_cast<size_t>(source)] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    for (VertexId w : g.neighbors(v)) {
      if (dist[static_cast<size_t>(w)] < 0) {
        dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace mrplan
