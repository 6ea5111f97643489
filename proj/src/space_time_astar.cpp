#include "mrplan/space_time_astar.hpp"

#include <algorithm>
#include <set>

namespace mrplan {

void ConflictAvoidanceTable::add_path(const std::vector<VertexId>& seq) {
  if (seq.empty()) return;
  for (size_t t = 0; t < seq.size(); ++t) {
    ++vertex_[vkey(seq[t], static_cast<int>(t))];
    if (t > 0 && seq[t] != seq[t - 1]) {
      ++moves_[mkey(seq[t - 1], seq[t], static_cast<int>(t))];
    }
  }
  parked_[seq.back()].push_back(static_cast<int>(seq.size()) - 1);
  ++paths_;
}

int ConflictAvoidanceTable::vertex_hits(VertexId v, int t) const {
  int hits = 0;
  if (auto it = vertex_.find(vkey(v, t)); it != vertex_.end()) hits += it->second;
  if (auto it = parked_.find(v); it != parked_.end()) {
    for (int settle : it->second) {
      if (t > settle) ++hits;
    }
  }
  return hits;
}

int ConflictAvoidanceTable::swap_hits(VertexId from, VertexId to, int t) const {
  auto it = moves_.find(mkey(to, from, t));
  return it == moves_.end() ? 0 : it->second;
}

namespace {

struct Node {
  VertexId v;
  int t;
  double g;
  double f;
  int conflicts;
  int off_highway;
  int parent;   // arena index, -1 for the root
  int action;   // 0 = start/wait, 1 = move
};

struct Search {
  std::vector<Node> arena;
  const bool highway_ties;

  explicit Search(bool hw) : highway_ties(hw) {}

  // (f, off-highway moves, t, v, action) and arena index last for totality.
  bool open_less(int a, int b) const {
    const Node& x = arena[static_cast<size_t>(a)];
    const Node& y = arena[static_cast<size_t>(b)];
    if (x.f != y.f) return x.f < y.f;
    if (highway_ties && x.off_highway != y.off_highway) {
      return x.off_highway < y.off_highway;
    }
    if (x.t != y.t) return x.t < y.t;
    if (x.v != y.v) return x.v < y.v;
    if (x.action != y.action) return x.action < y.action;
    return a < b;
  }
  bool focal_less(int a, int b) const {
    const Node& x = arena[static_cast<size_t>(a)];
    const Node& y = arena[static_cast<size_t>(b)];
    if (x.conflicts != y.conflicts) return x.conflicts < y.conflicts;
    return open_less(a, b);
  }
};

std::uint64_t state_key(VertexId v, int t) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 32) |
         static_cast<std::uint32_t>(t);
}

}  // namespace

AstarResult space_time_astar(const Graph& g, VertexId start, VertexId target,
                             const ConstraintSet& constraints, const AstarOptions& opt) {
  AstarResult result;
  std::vector<int> own_h;
  const std::vector<int>* h = opt.heuristic;
  if (!h) {
    own_h = bfs_hops(g, target);
    h = &own_h;
  }
  if ((*h)[static_cast<size_t>(start)] < 0) return result;

  const int settle_after = constraints.earliest_settle(target);
  const bool focal_mode = opt.focal_w > 1.0 || opt.cat != nullptr;

  Search search(opt.cost.highway_active());
  auto open_cmp = [&search](int a, int b) { return search.open_less(a, b); };
  auto focal_cmp = [&search](int a, int b) { return search.focal_less(a, b); };
  std::set<int, decltype(open_cmp)> open(open_cmp);
  std::set<int, decltype(focal_cmp)> focal(focal_cmp);
  std::unordered_map<std::uint64_t, int> best;  // state -> arena index

  auto conflicts_at = [&](VertexId v, int t, VertexId from, bool moved) {
    if (!opt.cat) return 0;
    int c = opt.cat->vertex_hits(v, t);
    if (moved) c += opt.cat->swap_hits(from, v, t);
    return c;
  };

  search.arena.push_back(Node{start, 0, 0.0, static_cast<double>((*h)[static_cast<size_t>(start)]),
                              conflicts_at(start, 0, start, false), 0, -1, 0});
  open.insert(0);
  if (focal_mode) focal.insert(0);
  best.emplace(state_key(start, 0), 0);

  double focal_bound = search.arena[0].f * opt.focal_w;
  long pops = 0;

  while (!open.empty()) {
    if (opt.deadline && (++pops & 1023) == 0 &&
        std::chrono::steady_clock::now() > *opt.deadline) {
      result.timed_out = true;
      return result;
    }

    double open_min = search.arena[static_cast<size_t>(*open.begin())].f;
    int current;
    if (focal_mode) {
      // Admit newly qualifying nodes whenever the bound moved.
      double new_bound = open_min * opt.focal_w;
      if (new_bound > focal_bound) {
        for (auto it = open.begin(); it != open.end(); ++it) {
          double f = search.arena[static_cast<size_t>(*it)].f;
          if (f > new_bound) break;
          if (f > focal_bound) focal.insert(*it);
        }
        focal_bound = new_bound;
      }
      current = *focal.begin();
      focal.erase(focal.begin());
      open.erase(current);
    } else {
      current = *open.begin();
      open.erase(open.begin());
    }

    Node node = search.arena[static_cast<size_t>(current)];
    if (node.v == target && node.t >= settle_after) {
      result.found = true;
      for (int at = current; at >= 0; at = search.arena[static_cast<size_t>(at)].parent) {
        result.path.push_back(search.arena[static_cast<size_t>(at)].v);
      }
      std::reverse(result.path.begin(), result.path.end());
      // Focal re-opening can leave a popped node's recorded g above the cost
      // of its current parent chain; the path itself stays valid, so price it
      // directly.
      result.cost = 0.0;
      for (size_t t = 1; t < result.path.size(); ++t) {
        result.cost += result.path[t] == result.path[t - 1]
                           ? opt.cost.wait_cost()
                           : opt.cost.move_cost(result.path[t - 1], result.path[t]);
      }
      double lb = node.f;
      if (!open.empty()) {
        lb = std::min(lb, search.arena[static_cast<size_t>(*open.begin())].f);
      }
      result.f_min = std::min(lb, result.cost);
      return result;
    }
    if (node.t >= opt.horizon) continue;

    auto consider = [&](VertexId w, bool moved) {
      int t = node.t + 1;
      if (constraints.vertex_forbidden(w, t)) return;
      if (moved && constraints.edge_forbidden(node.v, w, t)) return;
      if ((*h)[static_cast<size_t>(w)] < 0) return;
      double step = moved ? opt.cost.move_cost(node.v, w) : opt.cost.wait_cost();
      double child_g = node.g + step;
      double child_f = child_g + (*h)[static_cast<size_t>(w)];
      std::uint64_t key = state_key(w, t);
      auto it = best.find(key);
      if (it != best.end()) {
        Node& old = search.arena[static_cast<size_t>(it->second)];
        if (child_g >= old.g) return;  // first generation wins ties
        open.erase(it->second);
        if (focal_mode) focal.erase(it->second);
        old = Node{w, t, child_g, child_f,
                   node.conflicts + conflicts_at(w, t, node.v, moved),
                   node.off_highway +
                       ((moved && opt.cost.off_highway_move(node.v, w)) ? 1 : 0),
                   current, moved ? 1 : 0};
        open.insert(it->second);
        if (focal_mode && child_f <= focal_bound) focal.insert(it->second);
        return;
      }
      int idx = static_cast<int>(search.arena.size());
      search.arena.push_back(
          Node{w, t, child_g, child_f, node.conflicts + conflicts_at(w, t, node.v, moved),
               node.off_highway + ((moved && opt.cost.off_highway_move(node.v, w)) ? 1 : 0),
               current, moved ? 1 : 0});
      best.emplace(key, idx);
      open.insert(idx);
      if (focal_mode && child_f <= focal_bound) focal.insert(idx);
    };

    consider(node.v, false);
    for (VertexId w : g.neighbors(node.v)) consider(w, true);
  }
  return result;
}

}  // namespace mrplan
