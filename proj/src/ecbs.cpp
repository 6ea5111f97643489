#include <algorithm>
#include <set>

#include "ct_internal.hpp"
#include "mrplan/cbs.hpp"

namespace mrplan {

namespace {

using ct::Paths;

struct EcbsNode {
  Paths paths;
  std::vector<double> f_mins;  // per-robot certified lower bounds
  double cost = 0.0;           // search-space objective (inflated under highways)
  double lb = 0.0;             // sum or max of f_mins
  int conflicts = 0;
  int parent = -1;
  SpaceTimeConstraint constraint;
  bool has_constraint = false;
};

double combine(const std::vector<double>& values, Objective objective) {
  double total = 0.0;
  for (double v : values) {
    total = objective == Objective::makespan ? std::max(total, v) : total + v;
  }
  return total;
}

std::vector<double> path_costs(const Paths& paths, const CostModel& cost) {
  std::vector<double> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    double c = 0.0;
    for (size_t t = 1; t < p.size(); ++t) {
      c += p[t] == p[t - 1] ? cost.wait_cost() : cost.move_cost(p[t - 1], p[t]);
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

PlanResult plan_ecbs(const MapfInstance& instance, Objective objective, double w,
                     const HighwaySet* highways, std::optional<double> timeout_s) {
  if (!(w >= 1.0)) throw InputError("suboptimality bound w must be >= 1");
  MapfInstance checked = instance;
  require_valid(checked);
  const Graph& g = checked.graph;
  const int n = static_cast<int>(checked.robots.size());
  auto deadline = ct::make_deadline(timeout_s);

  CostModel cost_model;
  if (highways && !highways->empty()) {
    cost_model.highways = highways;
    cost_model.against_highway_cost = w;
  }

  std::vector<std::vector<int>> heuristics;
  heuristics.reserve(static_cast<size_t>(n));
  int makespan_lb = 0;
  for (const auto& r : checked.robots) {
    heuristics.push_back(bfs_hops(g, r.target));
    int d = heuristics.back()[static_cast<size_t>(r.start)];
    if (d < 0) return PlanResult{};
    makespan_lb = std::max(makespan_lb, d);
  }
  const int horizon = horizon_bound(g, n, makespan_lb);

  // Tiny joint spaces: decide solvability outright instead of exhausting the
  // conflict tree up to the horizon, which explodes on unsolvable instances.
  if (ct::joint_space_small(g, n) && !ct::joint_goal_reachable(checked)) {
    return PlanResult{};
  }

  auto replan = [&](int i, const ConstraintSet& constraints,
                    const ConflictAvoidanceTable& cat) {
    AstarOptions opt;
    opt.cost = cost_model;
    opt.horizon = horizon;
    opt.focal_w = w;
    opt.cat = &cat;
    opt.heuristic = &heuristics[static_cast<size_t>(i)];
    opt.deadline = deadline;
    return space_time_astar(g, checked.robots[static_cast<size_t>(i)].start,
                            checked.robots[static_cast<size_t>(i)].target, constraints,
                            opt);
  };

  auto cat_without = [&](const Paths& paths, int skip) {
    ConflictAvoidanceTable cat;
    for (int j = 0; j < static_cast<int>(paths.size()); ++j) {
      if (j != skip && !paths[static_cast<size_t>(j)].empty()) {
        cat.add_path(paths[static_cast<size_t>(j)]);
      }
    }
    return cat;
  };

  std::vector<EcbsNode> arena;
  arena.emplace_back();
  {
    EcbsNode& root = arena.back();
    root.paths.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      AstarResult r = replan(i, ConstraintSet{}, cat_without(root.paths, i));
      if (r.timed_out) return PlanResult{PlanStatus::timeout, {}, 0, 0, 0};
      if (!r.found) return PlanResult{};
      root.paths[static_cast<size_t>(i)] = std::move(r.path);
      root.f_mins.push_back(r.f_min);
    }
    root.cost = combine(path_costs(root.paths, cost_model), objective);
    root.lb = combine(root.f_mins, objective);
    root.conflicts = ct::count_all_conflicts(root.paths);
  }

  auto open_cmp = [&arena](int a, int b) {
    const EcbsNode& x = arena[static_cast<size_t>(a)];
    const EcbsNode& y = arena[static_cast<size_t>(b)];
    if (x.lb != y.lb) return x.lb < y.lb;
    return a < b;
  };
  auto focal_cmp = [&arena](int a, int b) {
    const EcbsNode& x = arena[static_cast<size_t>(a)];
    const EcbsNode& y = arena[static_cast<size_t>(b)];
    if (x.conflicts != y.conflicts) return x.conflicts < y.conflicts;
    if (x.cost != y.cost) return x.cost < y.cost;
    return a < b;
  };
  std::set<int, decltype(open_cmp)> open(open_cmp);
  std::set<int, decltype(focal_cmp)> focal(focal_cmp);
  open.insert(0);
  double focal_bound = arena[0].lb * w;
  if (arena[0].cost <= focal_bound) focal.insert(0);

  PlanResult result;
  while (!open.empty()) {
    if (deadline && std::chrono::steady_clock::now() > *deadline) {
      return PlanResult{PlanStatus::timeout, {}, 0, 0, result.high_level_expansions};
    }
    double lb_min = arena[static_cast<size_t>(*open.begin())].lb;
    double new_bound = lb_min * w;
    if (new_bound > focal_bound) {
      for (auto it = open.begin(); it != open.end(); ++it) {
        const EcbsNode& node = arena[static_cast<size_t>(*it)];
        if (node.cost <= new_bound && node.cost > focal_bound) focal.insert(*it);
      }
      focal_bound = new_bound;
    }
    if (focal.empty()) {
      // Everything within the bound was pruned; fall back to the best lb.
      focal.insert(*open.begin());
    }
    int current = *focal.begin();
    focal.erase(focal.begin());
    open.erase(current);
    ++result.high_level_expansions;

    ct::FirstConflict fc = ct::first_conflict(arena[static_cast<size_t>(current)].paths);
    if (!fc.found) {
      const EcbsNode& node = arena[static_cast<size_t>(current)];
      result.status = PlanStatus::ok;
      result.plan = ct::to_plan(node.paths, checked);
      result.objective_value = objective == Objective::makespan
                                   ? result.plan.makespan()
                                   : result.plan.flowtime();
      result.lower_bound = lb_min;
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
        const EcbsNode& a = arena[static_cast<size_t>(at)];
        if (a.has_constraint && a.constraint.robot == robot_id) {
          constraints.add(a.constraint);
        }
      }

      AstarResult r = replan(robot_index, constraints,
                             cat_without(arena[static_cast<size_t>(current)].paths,
                                         robot_index));
      if (r.timed_out) {
        return PlanResult{PlanStatus::timeout, {}, 0, 0, result.high_level_expansions};
      }
      if (!r.found) continue;

      EcbsNode child;
      child.paths = arena[static_cast<size_t>(current)].paths;
      child.f_mins = arena[static_cast<size_t>(current)].f_mins;
      int before = ct::conflicts_involving(child.paths, robot_index);
      child.paths[static_cast<size_t>(robot_index)] = std::move(r.path);
      int after = ct::conflicts_involving(child.paths, robot_index);
      child.conflicts = arena[static_cast<size_t>(current)].conflicts - before + after;
      child.f_mins[static_cast<size_t>(robot_index)] =
          std::max(child.f_mins[static_cast<size_t>(robot_index)], r.f_min);
      child.lb = combine(child.f_mins, objective);
      child.cost = combine(path_costs(child.paths, cost_model), objective);
      child.parent = current;
      child.constraint = added;
      child.has_constraint = true;
      arena.push_back(std::move(child));
      int idx = static_cast<int>(arena.size()) - 1;
      open.insert(idx);
      if (arena[static_cast<size_t>(idx)].cost <= focal_bound) focal.insert(idx);
    }
  }
  return PlanResult{};
}

}  // namespace mrplan
