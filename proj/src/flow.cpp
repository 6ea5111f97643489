#include "mrplan/flow.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_set>
#include <vector>

#include "mrplan/graph.hpp"

namespace mrplan {
namespace {

constexpr long long kInfCost = std::numeric_limits<long long>::max() / 4;

// Min-cost max-flow with unit capacities, successive shortest paths and
// Johnson potentials. Deterministic: the heap breaks distance ties on node
// id, and arcs are stored in insertion order.
class UnitMcmf {
 public:
  explicit UnitMcmf(int node_count)
      : head_(node_count, -1),
        potential_(node_count, 0),
        dist_(node_count, kInfCost),
        parent_arc_(node_count, -1) {}

  void add_arc(int from, int to, int cap, int cost) {
    const int id = static_cast<int>(to_.size());
    to_.push_back(to);
    cap_.push_back(cap);
    cost_.push_back(cost);
    next_.push_back(head_[from]);
    head_[from] = id;
    to_.push_back(from);
    cap_.push_back(0);
    cost_.push_back(-cost);
    next_.push_back(head_[to]);
    head_[to] = id + 1;
  }

  // Pushes one unit from source to sink; false if the sink is unreachable
  // in the residual network.
  bool augment_unit(int source, int sink) {
    const int n = static_cast<int>(head_.size());
    std::fill(dist_.begin(), dist_.end(), kInfCost);
    std::fill(parent_arc_.begin(), parent_arc_.end(), -1);
    dist_[source] = 0;
    using Item = std::pair<long long, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    heap.push({0, source});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d != dist_[u]) continue;
      for (int a = head_[u]; a != -1; a = next_[a]) {
        if (cap_[a] <= 0) continue;
        const int v = to_[a];
        const long long nd = d + cost_[a] + potential_[u] - potential_[v];
        if (nd < dist_[v]) {
          dist_[v] = nd;
          parent_arc_[v] = a;
          heap.push({nd, v});
        }
      }
    }
    if (dist_[sink] >= kInfCost) return false;
    for (int v = 0; v < n; ++v)
      potential_[v] += std::min(dist_[v], dist_[sink]);
    for (int v = sink; v != source;) {
      const int a = parent_arc_[v];
      cap_[a] -= 1;
      cap_[a ^ 1] += 1;
      v = to_[a ^ 1];
    }
    return true;
  }

  int out_arc_with_flow(int node) const {
    for (int a = head_[node]; a != -1; a = next_[a]) {
      if ((a & 1) == 0 && cap_[a ^ 1] > 0) return a;
    }
    return -1;
  }

  int arc_to(int arc_id) const { return to_[arc_id]; }

 private:
  std::vector<int> head_;
  std::vector<int> to_;
  std::vector<int> cap_;
  std::vector<int> cost_;
  std::vector<int> next_;
  std::vector<long long> potential_;
  std::vector<long long> dist_;
  std::vector<int> parent_arc_;
};

uint64_t vkey(VertexId v, int t, int V) {
  return static_cast<uint64_t>(t) * static_cast<uint64_t>(V) +
         static_cast<uint64_t>(v);
}

uint64_t ekey(VertexId from, VertexId to, int t, int V) {
  const uint64_t base = static_cast<uint64_t>(V);
  return (static_cast<uint64_t>(t) * base + static_cast<uint64_t>(from)) *
             base +
         static_cast<uint64_t>(to);
}

}  // namespace

TeamFlowResult plan_team_flow(const Graph& graph, const Team& team, int T,
                              const TeamConstraintSet& constraints) {
  TeamFlowResult result;
  if (T < 0) return result;
  const int V = static_cast<int>(graph.vertex_count());
  const int E = static_cast<int>(graph.edge_count());
  const int n = static_cast<int>(team.starts.size());

  std::unordered_set<uint64_t> banned_vertex;
  std::unordered_set<uint64_t> banned_move;
  for (const TeamProhibition& p : constraints) {
    if (p.timestep < 0 || p.timestep > T) continue;
    if (p.kind == TeamProhibition::Kind::vertex)
      banned_vertex.insert(vkey(p.v, p.timestep, V));
    else
      banned_move.insert(ekey(p.from, p.v, p.timestep, V));
  }

  // Node layout: per (vertex, timestep) a capacity-1 in/out split, per
  // (edge, timestep) the two internal gadget nodes, then source and sink.
  const auto in_node = [V](VertexId v, int t) { return 2 * (t * V + v); };
  const auto out_node = [V](VertexId v, int t) { return 2 * (t * V + v) + 1; };
  const int gadget_base = 2 * V * (T + 1);
  const auto g_entry = [&](int e, int t) { return gadget_base + 2 * (t * E + e); };
  const int source = gadget_base + 2 * E * T;
  const int sink = source + 1;

  UnitMcmf net(sink + 1);
  for (int t = 0; t <= T; ++t) {
    for (VertexId v = 0; v < V; ++v) {
      if (banned_vertex.count(vkey(v, t, V))) continue;
      net.add_arc(in_node(v, t), out_node(v, t), 1, 0);
    }
  }
  for (int t = 0; t < T; ++t) {
    for (VertexId v = 0; v < V; ++v)
      net.add_arc(out_node(v, t), in_node(v, t + 1), 1, 0);
    for (int e = 0; e < E; ++e) {
      const Edge& edge = graph.edges()[static_cast<size_t>(e)];
      const int g1 = g_entry(e, t);
      const int g2 = g1 + 1;
      if (!banned_move.count(ekey(edge.u, edge.v, t + 1, V)))
        net.add_arc(out_node(edge.u, t), g1, 1, 0);
      if (!banned_move.count(ekey(edge.v, edge.u, t + 1, V)))
        net.add_arc(out_node(edge.v, t), g1, 1, 0);
      net.add_arc(g1, g2, 1, 1);
      net.add_arc(g2, in_node(edge.u, t + 1), 1, 0);
      net.add_arc(g2, in_node(edge.v, t + 1), 1, 0);
    }
  }
  for (VertexId s : team.starts) net.add_arc(source, in_node(s, 0), 1, 0);
  for (VertexId g : team.targets) net.add_arc(out_node(g, T), sink, 1, 0);

  for (int unit = 0; unit < n; ++unit) {
    if (!net.augment_unit(source, sink)) return result;
  }

  // Unit capacities on every split make the flow node-disjoint, so each
  // start has a unique forward walk to the sink.
  result.paths.assign(n, {});
  for (int i = 0; i < n; ++i) {
    std::vector<VertexId>& path = result.paths[i];
    int node = in_node(team.starts[i], 0);
    int t = 0;
    while (true) {
      path.push_back(static_cast<VertexId>((node / 2) % V));
      const int split = net.out_arc_with_flow(node);  // in -> out
      if (split == -1) return TeamFlowResult{};
      int cur = net.arc_to(split);
      if (t == T) break;
      int a = net.out_arc_with_flow(cur);
      if (a == -1) return TeamFlowResult{};
      cur = net.arc_to(a);
      while (cur >= gadget_base) {  // pass through the edge gadget
        a = net.out_arc_with_flow(cur);
        if (a == -1) return TeamFlowResult{};
        cur = net.arc_to(a);
      }
      node = cur;
      ++t;
    }
  }
  result.feasible = true;
  return result;
}

}  // namespace mrplan
