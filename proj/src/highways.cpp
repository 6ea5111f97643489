#include "mrplan/highways.hpp"

#include <map>

#include "mrplan/cbm.hpp"

namespace mrplan {

void HighwaySet::add(const Graph& g, VertexId from, VertexId to) {
  if (!g.has_edge(from, to)) {
    throw InputError("highway " + g.name(from) + "->" + g.name(to) + " is not an edge");
  }
  if (contains(to, from)) {
    throw InputError("highway " + g.name(from) + "->" + g.name(to) +
                     " conflicts with the opposite direction already present");
  }
  if (arcs_.insert(key(from, to)).second) listed_.emplace_back(from, to);
}

bool HighwaySet::contains(VertexId from, VertexId to) const {
  return arcs_.count(key(from, to)) != 0;
}

std::vector<VertexId> deterministic_shortest_path(const Graph& g, VertexId start,
                                                  VertexId target) {
  std::vector<int> dist = bfs_hops(g, target);
  if (dist[static_cast<size_t>(start)] < 0) {
    throw InputError("no path from '" + g.name(start) + "' to '" + g.name(target) + "'");
  }
  std::vector<VertexId> path{start};
  VertexId at = start;
  while (at != target) {
    VertexId next = kNoVertex;
    for (VertexId w : g.neighbors(at)) {  // ascending ids: first best wins
      if (dist[static_cast<size_t>(w)] == dist[static_cast<size_t>(at)] - 1) {
        next = w;
        break;
      }
    }
    path.push_back(next);
    at = next;
  }
  return path;
}

namespace {

HighwaySet majority_directions(const Graph& g,
                               const std::vector<std::vector<VertexId>>& paths) {
  // key: undirected edge as (min,max); value: traversals (min->max, max->min)
  std::map<std::pair<VertexId, VertexId>, std::pair<int, int>> counts;
  for (const auto& path : paths) {
    for (size_t i = 1; i < path.size(); ++i) {
      VertexId a = path[i - 1], b = path[i];
      if (a < b) {
        ++counts[{a, b}].first;
      } else {
        ++counts[{b, a}].second;
      }
    }
  }
  HighwaySet hw;
  for (const auto& [edge, c] : counts) {
    if (c.first > c.second) {
      hw.add(g, edge.first, edge.second);
    } else if (c.second > c.first) {
      hw.add(g, edge.second, edge.first);
    }
    // exact tie: omitted
  }
  return hw;
}

}  // namespace

HighwaySet suggest_highways(const MapfInstance& instance) {
  std::vector<std::vector<VertexId>> paths;
  paths.reserve(instance.robots.size());
  for (const auto& r : instance.robots) {
    paths.push_back(deterministic_shortest_path(instance.graph, r.start, r.target));
  }
  return majority_directions(instance.graph, paths);
}

HighwaySet suggest_highways(const TapfInstance& instance) {
  return suggest_highways(tapf_to_mapf(instance, bottleneck_assignment(instance)));
}

}  // namespace mrplan
