#include "mrplan/cbm.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "ct_internal.hpp"

namespace mrplan {
namespace {

void throw_if_invalid(const TapfInstance& instance) {
  const std::vector<Violation> violations = validate_instance(instance);
  if (violations.empty()) return;
  std::string msg = "invalid instance:";
  for (const Violation& v : violations) msg += " " + v.detail + ";";
  msg.pop_back();
  throw InputError(msg);
}

bool kuhn(int i, int limit, const std::vector<std::vector<int>>& d,
          std::vector<char>& visited, std::vector<int>& owner) {
  const int n = static_cast<int>(owner.size());
  for (int j = 0; j < n; ++j) {
    if (visited[j] || d[static_cast<size_t>(i)][static_cast<size_t>(j)] < 0 ||
        d[static_cast<size_t>(i)][static_cast<size_t>(j)] > limit) {
      continue;
    }
    visited[static_cast<size_t>(j)] = 1;
    if (owner[static_cast<size_t>(j)] < 0 ||
        kuhn(owner[static_cast<size_t>(j)], limit, d, visited, owner)) {
      owner[static_cast<size_t>(j)] = i;
      return true;
    }
  }
  return false;
}

// Perfect matching using only pairs with distance <= limit; assignment[i] is
// the matched target index of start i.
std::optional<std::vector<int>> match_within(
    const std::vector<std::vector<int>>& d, int limit) {
  const int n = static_cast<int>(d.size());
  std::vector<int> owner(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    std::vector<char> visited(static_cast<size_t>(n), 0);
    if (!kuhn(i, limit, d, visited, owner)) return std::nullopt;
  }
  std::vector<int> assignment(static_cast<size_t>(n), -1);
  for (int j = 0; j < n; ++j) assignment[static_cast<size_t>(owner[j])] = j;
  return assignment;
}

struct TeamBottleneck {
  std::vector<int> assignment;
  int value = 0;  // minimized max start->target hop distance
};

std::optional<TeamBottleneck> team_bottleneck(const Graph& g, const Team& team) {
  const int n = static_cast<int>(team.starts.size());
  if (n == 0) return TeamBottleneck{};
  std::vector<std::vector<int>> d(static_cast<size_t>(n),
                                  std::vector<int>(static_cast<size_t>(n)));
  std::set<int> thresholds;
  for (int i = 0; i < n; ++i) {
    const std::vector<int> hops = bfs_hops(g, team.starts[static_cast<size_t>(i)]);
    for (int j = 0; j < n; ++j) {
      const int dist = hops[static_cast<size_t>(team.targets[static_cast<size_t>(j)])];
      d[static_cast<size_t>(i)][static_cast<size_t>(j)] = dist;
      if (dist >= 0) thresholds.insert(dist);
    }
  }
  const std::vector<int> cs(thresholds.begin(), thresholds.end());
  if (cs.empty() || !match_within(d, cs.back())) return std::nullopt;
  size_t lo = 0, hi = cs.size() - 1;  // invariant: feasible at cs[hi]
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    if (match_within(d, static_cast<int>(cs[mid]))) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return TeamBottleneck{*match_within(d, cs[lo]), cs[lo]};
}

struct SeedAssignment {
  TeamAssignment assignment;
  int makespan_lb = 0;
};

std::optional<SeedAssignment> try_bottleneck(const TapfInstance& instance) {
  SeedAssignment seed;
  for (const Team& team : instance.teams) {
    auto tb = team_bottleneck(instance.graph, team);
    if (!tb) return std::nullopt;
    seed.assignment.push_back(std::move(tb->assignment));
    seed.makespan_lb = std::max(seed.makespan_lb, tb->value);
  }
  return seed;
}

// Robots of one team are interchangeable: any permutation of the team's
// target set counts as done.
bool tapf_goal_reachable(const TapfInstance& instance) {
  std::vector<VertexId> start;
  std::vector<std::vector<VertexId>> want;          // sorted targets per team
  std::vector<std::pair<size_t, size_t>> span;      // [begin, end) per team
  for (const Team& team : instance.teams) {
    span.emplace_back(start.size(), start.size() + team.starts.size());
    start.insert(start.end(), team.starts.begin(), team.starts.end());
    std::vector<VertexId> t = team.targets;
    std::sort(t.begin(), t.end());
    want.push_back(std::move(t));
  }
  return ct::joint_reachable(
      instance.graph, std::move(start), [&](const std::vector<VertexId>& pos) {
        std::vector<VertexId> group;
        for (size_t k = 0; k < want.size(); ++k) {
          group.assign(pos.begin() + static_cast<std::ptrdiff_t>(span[k].first),
                       pos.begin() + static_cast<std::ptrdiff_t>(span[k].second));
          std::sort(group.begin(), group.end());
          if (group != want[k]) return false;
        }
        return true;
      });
}

// Earliest conflict between robots of different teams, in (timestep, robot
// pair, vertex before edge) order; robot fields hold global indices.
ct::FirstConflict first_team_conflict(const ct::Paths& paths,
                                      const std::vector<int>& team_of) {
  const int T = ct::max_len(paths);
  const int n = static_cast<int>(paths.size());
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (team_of[static_cast<size_t>(i)] == team_of[static_cast<size_t>(j)]) continue;
        const auto& a = paths[static_cast<size_t>(i)];
        const auto& b = paths[static_cast<size_t>(j)];
        if (ct::at(a, t) == ct::at(b, t)) {
          return {true,
                  Conflict{Conflict::Kind::vertex, i, j, t, ct::at(a, t), kNoVertex}};
        }
        if (t > 0 && ct::at(a, t - 1) == ct::at(b, t) &&
            ct::at(a, t) == ct::at(b, t - 1) && ct::at(a, t) != ct::at(a, t - 1)) {
          return {true,
                  Conflict{Conflict::Kind::edge, i, j, t, ct::at(a, t), ct::at(a, t - 1)}};
        }
      }
    }
  }
  return {};
}

int count_team_conflicts(const ct::Paths& paths, const std::vector<int>& team_of) {
  const int T = ct::max_len(paths);
  const int n = static_cast<int>(paths.size());
  int count = 0;
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (team_of[static_cast<size_t>(i)] == team_of[static_cast<size_t>(j)]) continue;
        const auto& a = paths[static_cast<size_t>(i)];
        const auto& b = paths[static_cast<size_t>(j)];
        if (ct::at(a, t) == ct::at(b, t)) ++count;
        if (t > 0 && ct::at(a, t - 1) == ct::at(b, t) &&
            ct::at(a, t) == ct::at(b, t - 1) && ct::at(a, t) != ct::at(a, t - 1)) {
          ++count;
        }
      }
    }
  }
  return count;
}

}  // namespace

TeamAssignment bottleneck_assignment(const TapfInstance& instance) {
  throw_if_invalid(instance);
  auto seed = try_bottleneck(instance);
  if (!seed) {
    throw InputError("no complete start->target assignment exists for some team");
  }
  return std::move(seed->assignment);
}

MapfInstance tapf_to_mapf(const TapfInstance& instance,
                          const TeamAssignment& assignment) {
  if (assignment.size() != instance.teams.size()) {
    throw InputError("assignment covers " + std::to_string(assignment.size()) +
                     " teams, instance has " + std::to_string(instance.teams.size()));
  }
  MapfInstance out;
  out.graph = instance.graph;
  RobotId next_id = 0;
  for (size_t k = 0; k < instance.teams.size(); ++k) {
    const Team& team = instance.teams[k];
    const std::vector<int>& a = assignment[k];
    const size_t n = team.starts.size();
    if (a.size() != n) {
      throw InputError("assignment for team " + std::to_string(team.id) +
                       " has wrong size");
    }
    std::vector<char> used(n, 0);
    for (int j : a) {
      if (j < 0 || static_cast<size_t>(j) >= n || used[static_cast<size_t>(j)]) {
        throw InputError("assignment for team " + std::to_string(team.id) +
                         " is not a bijection onto its targets");
      }
      used[static_cast<size_t>(j)] = 1;
    }
    for (size_t i = 0; i < n; ++i) {
      out.robots.push_back(RobotSpec{next_id++, team.starts[i],
                                     team.targets[static_cast<size_t>(a[i])]});
    }
  }
  return out;
}

PlanResult plan_cbm(const TapfInstance& instance, std::optional<double> timeout_s) {
  TapfInstance inst = instance;
  require_valid(inst);

  PlanResult result;
  const auto deadline = ct::make_deadline(timeout_s);
  const auto expired = [&deadline] {
    return deadline && std::chrono::steady_clock::now() >= *deadline;
  };

  const auto seed = try_bottleneck(inst);
  if (!seed) return result;  // some team cannot reach a full target set

  // Tiny joint spaces: decide solvability outright instead of exhausting one
  // conflict tree per horizon step, which explodes on unsolvable instances.
  if (ct::joint_space_small(inst.graph, inst.robot_count()) &&
      !tapf_goal_reachable(inst)) {
    return result;
  }

  const int robot_count = inst.robot_count();
  const int team_count = static_cast<int>(inst.teams.size());
  std::vector<int> team_of;
  team_of.reserve(static_cast<size_t>(robot_count));
  for (int k = 0; k < team_count; ++k) {
    for (size_t i = 0; i < inst.teams[static_cast<size_t>(k)].starts.size(); ++i) {
      team_of.push_back(k);
    }
  }
  std::vector<int> team_offset(static_cast<size_t>(team_count), 0);
  for (int k = 1; k < team_count; ++k) {
    team_offset[static_cast<size_t>(k)] =
        team_offset[static_cast<size_t>(k - 1)] +
        static_cast<int>(inst.teams[static_cast<size_t>(k - 1)].starts.size());
  }

  struct TreeNode {
    std::vector<TeamConstraintSet> constraints;  // per team
    ct::Paths paths;                             // per global robot, length T+1
    int conflicts = 0;
  };
  const auto splice_team = [&](TreeNode& node, int k,
                               std::vector<std::vector<VertexId>>&& team_paths) {
    for (size_t i = 0; i < team_paths.size(); ++i) {
      node.paths[static_cast<size_t>(team_offset[static_cast<size_t>(k)]) + i] =
          std::move(team_paths[i]);
    }
  };

  const int horizon = horizon_bound(inst.graph, robot_count, seed->makespan_lb);
  for (int T = seed->makespan_lb; T <= horizon; ++T) {
    if (expired()) {
      result.status = PlanStatus::timeout;
      return result;
    }
    TreeNode root;
    root.constraints.assign(static_cast<size_t>(team_count), {});
    root.paths.assign(static_cast<size_t>(robot_count), {});
    bool root_ok = true;
    for (int k = 0; k < team_count; ++k) {
      TeamFlowResult flow =
          plan_team_flow(inst.graph, inst.teams[static_cast<size_t>(k)], T, {});
      if (!flow.feasible) {
        root_ok = false;  // no routing for this team at T under no constraints
        break;
      }
      splice_team(root, k, std::move(flow.paths));
    }
    if (!root_ok) continue;
    root.conflicts = count_team_conflicts(root.paths, team_of);

    std::vector<TreeNode> arena;
    arena.push_back(std::move(root));
    std::set<std::pair<int, int>> open;  // (conflicts, creation index)
    open.insert({arena[0].conflicts, 0});
    while (!open.empty()) {
      if (expired()) {
        result.status = PlanStatus::timeout;
        return result;
      }
      const int idx = open.begin()->second;
      open.erase(open.begin());
      const ct::FirstConflict fc = first_team_conflict(arena[static_cast<size_t>(idx)].paths, team_of);
      if (!fc.found) {
        DiscretePlan plan;
        for (int g = 0; g < robot_count; ++g) {
          plan.robots.push_back(
              RobotPath{g, arena[static_cast<size_t>(idx)].paths[static_cast<size_t>(g)]});
        }
        result.status = PlanStatus::ok;
        result.plan = std::move(plan);
        result.objective_value = static_cast<double>(result.plan.makespan());
        result.lower_bound = static_cast<double>(T);  // smaller horizons exhausted
        return result;
      }
      ++result.high_level_expansions;
      const Conflict& c = fc.conflict;
      for (int side = 0; side < 2; ++side) {
        const int robot = side == 0 ? c.a : c.b;
        const int k = team_of[static_cast<size_t>(robot)];
        TeamProhibition p;
        p.timestep = c.timestep;
        if (c.kind == Conflict::Kind::vertex) {
          p.kind = TeamProhibition::Kind::vertex;
          p.v = c.v;
        } else {
          p.kind = TeamProhibition::Kind::edge;
          // c records the first robot's move as u -> v; the second robot
          // makes the opposite traversal.
          p.v = side == 0 ? c.v : c.u;
          p.from = side == 0 ? c.u : c.v;
        }
        TreeNode child = arena[static_cast<size_t>(idx)];
        child.constraints[static_cast<size_t>(k)].push_back(p);
        TeamFlowResult flow =
            plan_team_flow(inst.graph, inst.teams[static_cast<size_t>(k)], T,
                           child.constraints[static_cast<size_t>(k)]);
        if (!flow.feasible) continue;  // prune: this team cannot comply at T
        splice_team(child, k, std::move(flow.paths));
        child.conflicts = count_team_conflicts(child.paths, team_of);
        arena.push_back(std::move(child));
        open.insert({arena.back().conflicts, static_cast<int>(arena.size()) - 1});
      }
    }
  }
  return result;  // every horizon up to the bound exhausted: infeasible
}

}  // namespace mrplan
