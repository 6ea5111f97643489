#include "mrplan/cbs.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include "ct_internal.hpp"

namespace mrplan {

int horizon_bound(const Graph& graph, int robot_count, int makespan_lb) {
  return graph.vertex_count() * robot_count + makespan_lb;
}

namespace {

using ct::Paths;

struct CtNode {
  Paths paths;
  double cost = 0.0;
  int conflicts = 0;
  int parent = -1;
  SpaceTimeConstraint constraint;  // the one added at this node (unused at root)
  bool has_constraint = false;
};

double node_cost(const Paths& paths, Objective objective) {
  double total = 0.0;
  for (const auto& p : paths) {
    double c = static_cast<double>(p.size()) - 1.0;
    total = objective == Objective::makespan ? std::max(total, c) : total + c;
  }
  return total;
}

}  // namespace

PlanResult plan_cbs(const MapfInstance& instance, Objective objective,
                    std::optional<double> timeout_s) {
  MapfInstance checked = instance;
  require_valid(checked);
  const Graph& g = checked.graph;
  const int n = static_cast<int>(checked.robots.size());
  auto deadline = ct::make_deadline(timeout_s);

  std::vector<std::vector<int>> heuristics;
  heuristics.reserve(static_cast<size_t>(n));
  int makespan_lb = 0;
  for (const auto& r : checked.robots) {
    heuristics.push_back(bfs_hops(g, r.target));
    int d = heuristics.back()[static_cast<size_t>(r.start)];
    if (d < 0) return PlanResult{};  // unreachable target: infeasible
    makespan_lb = std::max(makespan_lb, d);
  }
  const int horizon = horizon_bound(g, n, makespan_lb);

  // Tiny joint spaces: decide solvability outright instead of exhausting the
  // conflict tree up to the horizon, which explodes on unsolvable instances.
  if (ct::joint_space_small(g, n) && !ct::joint_goal_reachable(checked)) {
    return PlanResult{};
  }

  auto replan = [&](int i, const ConstraintSet& constraints) {
    AstarOptions opt;
    opt.horizon = horizon;
    opt.heuristic = &heuristics[static_cast<size_t>(i)];
    opt.deadline = deadline;
    return space_time_astar(g, checked.robots[static_cast<size_t>(i)].start,
                            checked.robots[static_cast<size_t>(i)].target, constraints,
                            opt);
  };

  std::vector<CtNode> arena;
  arena.emplace_back();
  CtNode& root = arena.back();
  for (int i = 0; i < n; ++i) {
    AstarResult r = replan(i, ConstraintSet{});
    if (r.timed_out) return PlanResult{PlanStatus::timeout, {}, 0, 0, 0};
    if (!r.found) return PlanResult{};
    root.paths.push_back(std::move(r.path));
  }
  root.cost = node_cost(root.paths, objective);
  root.conflicts = ct::count_all_conflicts(root.paths);

  // Best-first on (cost, conflicts, creation order).
  auto cmp = [&arena](int a, int b) {
    const CtNode& x = arena[static_cast<size_t>(a)];
    const CtNode& y = arena[static_cast<size_t>(b)];
    if (x.cost != y.cost) return x.cost < y.cost;
    if (x.conflicts != y.conflicts) return x.conflicts < y.conflicts;
    return a < b;
  };
  std::set<int, decltype(cmp)> open(cmp);
  open.insert(0);

  PlanResult result;
  while (!open.empty()) {
    if (deadline && std::chrono::steady_clock::now() > *deadline) {
      return PlanResult{PlanStatus::timeout, {}, 0, 0, result.high_level_expansions};
    }
    int current = *open.begin();
    open.erase(open.begin());
    ++result.high_level_expansions;

    ct::FirstConflict fc = ct::first_conflict(arena[static_cast<size_t>(current)].paths);
    if (!fc.found) {
      const CtNode& node = arena[static_cast<size_t>(current)];
      result.status = PlanStatus::ok;
      result.plan = ct::to_plan(node.paths, checked);
      result.objective_value = objective == Objective::makespan
                                   ? result.plan.makespan()
                                   : result.plan.flowtime();
      result.lower_bound = node.cost;
      return result;
    }

    for (int side = 0; side < 2; ++side) {
      int robot_index = side == 0 ? fc.conflict.a : fc.conflict.b;
      RobotId robot_id = checked.robots[static_cast<size_t>(robot_index)].id;
      SpaceTimeConstraint added = ct::constraint_for(
          fc.conflict, arena[static_cast<size_t>(current)].paths, robot_index, robot_id);

      ConstraintSet constraints;
      constraints.add(added);
      for (int at = current; at > 0; at = arena[static_cast<size_t>(at)].parent) {
        const CtNode& a = arena[static_cast<size_t>(at)];
        if (a.has_constraint && a.constraint.robot == robot_id) {
          constraints.add(a.constraint);
        }
      }

      AstarResult r = replan(robot_index, constraints);
      if (r.timed_out) {
        return PlanResult{PlanStatus::timeout, {}, 0, 0, result.high_level_expansions};
      }
      if (!r.found) continue;  // this branch is a dead end

      CtNode child;
      child.paths = arena[static_cast<size_t>(current)].paths;
      int before = ct::conflicts_involving(child.paths, robot_index);
      child.paths[static_cast<size_t>(robot_index)] = std::move(r.path);
      int after = ct::conflicts_involving(child.paths, robot_index);
      child.conflicts = arena[static_cast<size_t>(current)].conflicts - before + after;
      child.cost = node_cost(child.paths, objective);
      child.parent = current;
      child.constraint = added;
      child.has_constraint = true;
      arena.push_back(std::move(child));
      open.insert(static_cast<int>(arena.size()) - 1);
    }
  }
  return PlanResult{};  // tree exhausted within the horizon: infeasible
}

}  // namespace mrplan
