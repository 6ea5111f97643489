#pragma once

// Shared internals of the two conflict-tree planners.

#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "mrplan/cbs.hpp"
#include "mrplan/space_time_astar.hpp"

namespace mrplan::ct {

using Paths = std::vector<std::vector<VertexId>>;

inline VertexId at(const std::vector<VertexId>& seq, int t) {
  return t < static_cast<int>(seq.size()) ? seq[static_cast<size_t>(t)] : seq.back();
}

inline int max_len(const Paths& paths) {
  size_t m = 0;
  for (const auto& p : paths) m = std::max(m, p.size());
  return static_cast<int>(m);
}

struct FirstConflict {
  bool found = false;
  Conflict conflict;  // robot fields hold robot *indices* here
};

// Earliest conflict in (timestep, robot pair, vertex before edge) order.
inline FirstConflict first_conflict(const Paths& paths) {
  int T = max_len(paths);
  int n = static_cast<int>(paths.size());
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const auto& a = paths[static_cast<size_t>(i)];
        const auto& b = paths[static_cast<size_t>(j)];
        if (at(a, t) == at(b, t)) {
          return {true, Conflict{Conflict::Kind::vertex, i, j, t, at(a, t), kNoVertex}};
        }
        if (t > 0 && at(a, t - 1) == at(b, t) && at(a, t) == at(b, t - 1) &&
            at(a, t) != at(a, t - 1)) {
          return {true, Conflict{Conflict::Kind::edge, i, j, t, at(a, t), at(a, t - 1)}};
        }
      }
    }
  }
  return {};
}

// Conflicts of robot i against everyone else (for incremental node counts).
inline int conflicts_involving(const Paths& paths, int i) {
  int T = max_len(paths);
  int n = static_cast<int>(paths.size());
  int count = 0;
  const auto& a = paths[static_cast<size_t>(i)];
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const auto& b = paths[static_cast<size_t>(j)];
    for (int t = 0; t < T; ++t) {
      if (at(a, t) == at(b, t)) ++count;
      if (t > 0 && at(a, t - 1) == at(b, t) && at(a, t) == at(b, t - 1) &&
          at(a, t) != at(a, t - 1)) {
        ++count;
      }
    }
  }
  return count;
}

inline int count_all_conflicts(const Paths& paths) {
  int total = 0;
  for (int i = 0; i < static_cast<int>(paths.size()); ++i) {
    total += conflicts_involving(paths, i);
  }
  return total / 2;
}

inline DiscretePlan to_plan(const Paths& paths, const MapfInstance& instance) {
  DiscretePlan plan;
  for (size_t i = 0; i < paths.size(); ++i) {
    plan.robots.push_back(RobotPath{instance.robots[i].id, paths[i]});
  }
  plan.pad_to(max_len(paths) - 1);
  return plan;
}

inline std::optional<std::chrono::steady_clock::time_point> make_deadline(
    std::optional<double> timeout_s) {
  if (!timeout_s) return std::nullopt;
  return std::chrono::steady_clock::now() +
         std::chrono::duration_cast<std::chrono::steady_clock::duration>(
             std::chrono::duration<double>(*timeout_s));
}

// True when |V|^robots stays within an exhaustively searchable budget.
inline bool joint_space_small(const Graph& g, int robots) {
  constexpr double kMaxStates = 200000.0;
  double states = 1.0;
  for (int i = 0; i < robots; ++i) {
    states *= static_cast<double>(g.vertex_count());
    if (states > kMaxStates) return false;
  }
  return true;
}

// BFS over the joint configuration space (each robot stays or steps to a
// neighbor; no shared vertex, no swap) until at_goal(positions) holds.
template <typename GoalFn>
inline bool joint_reachable(const Graph& g, std::vector<VertexId> start,
                            GoalFn&& at_goal) {
  const int n = static_cast<int>(start.size());
  if (at_goal(start)) return true;
  const auto base = static_cast<std::uint64_t>(g.vertex_count());
  auto key_of = [&](const std::vector<VertexId>& pos) {
    std::uint64_t key = 0;
    for (VertexId v : pos) key = key * base + static_cast<std::uint64_t>(v);
    return key;
  };
  std::unordered_set<std::uint64_t> seen{key_of(start)};
  std::queue<std::vector<VertexId>> frontier;
  frontier.push(std::move(start));
  std::vector<VertexId> next(static_cast<size_t>(n));
  bool found = false;
  while (!frontier.empty() && !found) {
    const std::vector<VertexId> from = std::move(frontier.front());
    frontier.pop();
    auto place = [&](auto&& self, int i) -> void {
      if (found) return;
      if (i == n) {
        if (!seen.insert(key_of(next)).second) return;
        if (at_goal(next)) {
          found = true;
          return;
        }
        frontier.push(next);
        return;
      }
      auto step = [&](VertexId v) {
        for (int j = 0; j < i; ++j) {
          const auto ju = static_cast<size_t>(j);
          if (next[ju] == v) return;  // two robots on one vertex
          if (next[ju] == from[static_cast<size_t>(i)] && from[ju] == v) return;  // swap
        }
        next[static_cast<size_t>(i)] = v;
        self(self, i + 1);
      };
      step(from[static_cast<size_t>(i)]);
      for (VertexId nb : g.neighbors(from[static_cast<size_t>(i)])) step(nb);
    };
    place(place, 0);
  }
  return found;
}

// Exhaustive solvability check; the conflict tree proves infeasibility too,
// but only after blowing through the horizon on every branch. For small
// instances this settles the question outright.
inline bool joint_goal_reachable(const MapfInstance& instance) {
  std::vector<VertexId> start, goal;
  for (const RobotSpec& r : instance.robots) {
    start.push_back(r.start);
    goal.push_back(r.target);
  }
  return joint_reachable(instance.graph, std::move(start),
                         [&goal](const std::vector<VertexId>& pos) { return pos == goal; });
}

inline SpaceTimeConstraint constraint_for(const Conflict& c, const Paths& paths,
                                          int robot_index, RobotId robot_id) {
  if (c.kind == Conflict::Kind::vertex) {
    return SpaceTimeConstraint{SpaceTimeConstraint::Kind::vertex, robot_id, c.v, kNoVertex,
                               c.timestep};
  }
  const auto& seq = paths[static_cast<size_t>(robot_index)];
  return SpaceTimeConstraint{SpaceTimeConstraint::Kind::edge, robot_id,
                             at(seq, c.timestep), at(seq, c.timestep - 1), c.timestep};
}

}  // namespace mrplan::ct
