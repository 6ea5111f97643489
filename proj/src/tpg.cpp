#include "mrplan/tpg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mrplan/conflicts.hpp"

namespace mrplan {
namespace {

struct Occupancy {
  int enter = 0;       // first timestep at the vertex
  int robot = 0;       // robot index
  int arrival = -1;    // node id of the arrival event
  int departure = -1;  // node id of the event that vacates the vertex, -1 if final
};

double turn_between(Vec2 a, Vec2 b, Vec2 c) {
  const double ix = b.x - a.x, iy = b.y - a.y;
  const double ox = c.x - b.x, oy = c.y - b.y;
  const double ilen = std::hypot(ix, iy), olen = std::hypot(ox, oy);
  if (ilen == 0.0 || olen == 0.0) return 0.0;
  const double cross = ix * oy - iy * ox;
  const double dot = ix * ox + iy * oy;
  return std::atan2(std::abs(cross), dot);  // in [0, pi]
}

}  // namespace

Tpg build_tpg(const DiscretePlan& plan, const Graph& graph) {
  const std::vector<Conflict> conflicts = detect_conflicts(plan, graph);
  if (!conflicts.empty()) {
    const Conflict& c = conflicts.front();
    throw InputError("plan has " + std::to_string(conflicts.size()) +
                     " conflict(s); first between robots " + std::to_string(c.a) +
                     " and " + std::to_string(c.b) + " at timestep " +
                     std::to_string(c.timestep));
  }

  Tpg tpg;
  const int robot_count = static_cast<int>(plan.robots.size());
  tpg.chains.resize(static_cast<size_t>(robot_count));
  for (int r = 0; r < robot_count; ++r) {
    const std::vector<VertexId>& seq = plan.robots[static_cast<size_t>(r)].seq;
    auto& chain = tpg.chains[static_cast<size_t>(r)];
    for (int t = 0; t < static_cast<int>(seq.size()); ++t) {
      if (t > 0 && seq[static_cast<size_t>(t)] == seq[static_cast<size_t>(t - 1)]) {
        continue;  // waits extend the previous arrival event
      }
      chain.push_back(static_cast<int>(tpg.nodes.size()));
      tpg.nodes.push_back(TpgNode{r, t, seq[static_cast<size_t>(t)]});
    }
  }

  // Per-vertex occupancy intervals; a conflict-free plan keeps them disjoint,
  // so sorting by entry time orders the occupants.
  std::map<VertexId, std::vector<Occupancy>> occupants;
  for (int r = 0; r < robot_count; ++r) {
    const auto& chain = tpg.chains[static_cast<size_t>(r)];
    for (size_t i = 0; i < chain.size(); ++i) {
      const TpgNode& node = tpg.nodes[static_cast<size_t>(chain[i])];
      Occupancy occ;
      occ.enter = node.timestep;
      occ.robot = r;
      occ.arrival = chain[i];
      occ.departure = i + 1 < chain.size() ? chain[i + 1] : -1;
      occupants[node.vertex].push_back(occ);
    }
  }
  for (auto& [vertex, list] : occupants) {
    std::sort(list.begin(), list.end(),
              [](const Occupancy& a, const Occupancy& b) { return a.enter < b.enter; });
    for (size_t i = 1; i < list.size(); ++i) {
      const Occupancy& prev = list[i - 1];
      const Occupancy& next = list[i];
      if (prev.robot == next.robot) continue;  // ordered by the robot's own chain
      if (prev.departure < 0) {
        throw InputError("robot " + std::to_string(next.robot) + " enters vertex " +
                         graph.name(vertex) + " parked on by robot " +
                         std::to_string(prev.robot));
      }
      tpg.inter.push_back(Tpg::InterArc{prev.departure, next.arrival, vertex});
    }
  }
  return tpg;
}

namespace {

// The edge a marker for this inter arc endpoint lives on; `from` side is the
// predecessor's outgoing edge, `to` side the successor's incoming edge. Both
// are the chain arc ENDING at the tpg node (the departure event is the
// arrival at the next vertex; the successor's arrival is reached from its
// previous chain node).
struct MarkerHost {
  int chain_pos = 0;  // position of the endpoint node within its robot chain
  VertexId edge_u = kNoVertex;
  VertexId edge_v = kNoVertex;
};

MarkerHost host_for(const Tpg& tpg, const std::vector<int>& chain_pos_of, int node) {
  const TpgNode& n = tpg.nodes[static_cast<size_t>(node)];
  const int pos = chain_pos_of[static_cast<size_t>(node)];
  if (pos == 0) {
    throw InputError("inter-robot arc endpoint at a start event (robot " +
                     std::to_string(n.robot) + ")");
  }
  const auto& chain = tpg.chains[static_cast<size_t>(n.robot)];
  const TpgNode& prev = tpg.nodes[static_cast<size_t>(chain[static_cast<size_t>(pos - 1)])];
  return MarkerHost{pos, prev.vertex, n.vertex};
}

}  // namespace

double max_delta(const Tpg& tpg, const Graph& graph) {
  std::vector<int> chain_pos_of(tpg.nodes.size(), 0);
  for (const auto& chain : tpg.chains) {
    for (size_t i = 0; i < chain.size(); ++i) {
      chain_pos_of[static_cast<size_t>(chain[i])] = static_cast<int>(i);
    }
  }
  double min_len = 0.0;
  bool any = false;
  for (const auto& arc : tpg.inter) {
    for (int node : {arc.from, arc.to}) {
      const MarkerHost h = host_for(tpg, chain_pos_of, node);
      const double len = graph.edge_length(h.edge_u, h.edge_v);
      min_len = any ? std::min(min_len, len) : len;
      any = true;
    }
  }
  if (!any) {
    for (const Edge& e : graph.edges()) {
      min_len = any ? std::min(min_len, e.length) : e.length;
      any = true;
    }
  }
  return any ? min_len / 2.0 : 0.0;
}

AugmentedTpg augment_tpg(const Tpg& tpg, double delta, const Graph& graph) {
  if (delta < 0.0 || !std::isfinite(delta)) {
    throw InputError("safety distance must be finite and nonnegative");
  }
  std::vector<int> chain_pos_of(tpg.nodes.size(), 0);
  for (const auto& chain : tpg.chains) {
    for (size_t i = 0; i < chain.size(); ++i) {
      chain_pos_of[static_cast<size_t>(chain[i])] = static_cast<int>(i);
    }
  }

  // Which tpg nodes need a marker on their incoming chain arc, and for which
  // inter arc. Each node serves at most one arc per role: a departure event
  // vacates one vertex for one consecutive successor, an arrival follows one
  // consecutive predecessor.
  std::map<int, int> cleared_req;  // tpg node -> inter arc index
  std::map<int, int> within_req;
  for (size_t a = 0; a < tpg.inter.size(); ++a) {
    const auto& arc = tpg.inter[a];
    for (int node : {arc.from, arc.to}) {
      const MarkerHost h = host_for(tpg, chain_pos_of, node);
      const double len = graph.edge_length(h.edge_u, h.edge_v);
      if (delta > len / 2.0) {
        throw DeltaBoundError(
            "safety distance " + std::to_string(delta) + " exceeds half of edge " +
                graph.name(h.edge_u) + "-" + graph.name(h.edge_v) + " (length " +
                std::to_string(len) + ")",
            h.edge_u, h.edge_v, len);
      }
    }
    if (!cleared_req.emplace(arc.from, static_cast<int>(a)).second ||
        !within_req.emplace(arc.to, static_cast<int>(a)).second) {
      throw InputError("inter-robot arcs are not in consecutive-occupant form");
    }
  }

  AugmentedTpg aug;
  aug.delta = delta;
  aug.chains.resize(tpg.chains.size());
  aug.segs.resize(tpg.chains.size());
  std::vector<int> arrival_id(tpg.nodes.size(), -1);
  std::vector<int> cleared_id(tpg.inter.size(), -1);
  std::vector<int> within_id(tpg.inter.size(), -1);

  for (size_t r = 0; r < tpg.chains.size(); ++r) {
    const auto& chain = tpg.chains[r];
    auto& out_chain = aug.chains[r];
    auto& out_segs = aug.segs[r];
    for (size_t i = 0; i < chain.size(); ++i) {
      const TpgNode& node = tpg.nodes[static_cast<size_t>(chain[i])];
      if (i > 0) {
        // Chain arc from the previous arrival (at u) to this one (at node's
        // vertex); it may host the "cleared u" and/or "within vertex" marker.
        const TpgNode& prev = tpg.nodes[static_cast<size_t>(chain[i - 1])];
        const Edge* edge = graph.edge(prev.vertex, node.vertex);
        if (edge == nullptr) {
          throw InputError("chain step " + graph.name(prev.vertex) + "->" +
                           graph.name(node.vertex) + " is not a graph edge");
        }
        const Vec2 p0 = graph.pos(prev.vertex);
        const Vec2 p1 = graph.pos(node.vertex);
        const double len = edge->length;
        const double cap = edge->speed_limit.value_or(0.0);
        const auto lerp = [&](double arcpos) {
          const double f = arcpos / len;
          return Vec2{p0.x + (p1.x - p0.x) * f, p0.y + (p1.y - p0.y) * f};
        };
        double covered = 0.0;
        const auto emit_marker = [&](EventNode::Kind kind, VertexId guarded,
                                     double arcpos) {
          EventNode m;
          m.kind = kind;
          m.robot = node.robot;
          m.vertex = guarded;
          m.pos = lerp(arcpos);
          const int id = static_cast<int>(aug.nodes.size());
          aug.nodes.push_back(m);
          out_segs.push_back(ChainSeg{arcpos - covered, cap});
          out_chain.push_back(id);
          covered = arcpos;
          return id;
        };
        if (delta > 0.0) {
          const auto c = cleared_req.find(chain[i]);
          if (c != cleared_req.end()) {
            cleared_id[static_cast<size_t>(c->second)] =
                emit_marker(EventNode::Kind::cleared, prev.vertex, delta);
          }
          const auto w = within_req.find(chain[i]);
          if (w != within_req.end()) {
            within_id[static_cast<size_t>(w->second)] =
                emit_marker(EventNode::Kind::within, node.vertex, len - delta);
          }
        }
        out_segs.push_back(ChainSeg{len - covered, cap});
      }
      EventNode ev;
      ev.kind = EventNode::Kind::arrival;
      ev.robot = node.robot;
      ev.vertex = node.vertex;
      ev.pos = graph.pos(node.vertex);
      ev.timestep = node.timestep;
      if (i > 0 && i + 1 < chain.size()) {
        const TpgNode& prev = tpg.nodes[static_cast<size_t>(chain[i - 1])];
        const TpgNode& next = tpg.nodes[static_cast<size_t>(chain[i + 1])];
        ev.turn_angle = turn_between(graph.pos(prev.vertex), graph.pos(node.vertex),
                                     graph.pos(next.vertex));
      }
      arrival_id[static_cast<size_t>(chain[i])] = static_cast<int>(aug.nodes.size());
      out_chain.push_back(static_cast<int>(aug.nodes.size()));
      aug.nodes.push_back(ev);
    }
  }

  for (size_t a = 0; a < tpg.inter.size(); ++a) {
    const auto& arc = tpg.inter[a];
    const int from = delta > 0.0 ? cleared_id[a] : arrival_id[static_cast<size_t>(arc.from)];
    const int to = delta > 0.0 ? within_id[a] : arrival_id[static_cast<size_t>(arc.to)];
    aug.inter.push_back(AugmentedTpg::InterArc{from, to, arc.vertex});
  }
  return aug;
}

}  // namespace mrplan
