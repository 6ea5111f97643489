#include "mrplan/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrplan {

double Schedule::makespan() const {
  double m = 0.0;
  for (const auto& wps : robots) {
    if (!wps.empty()) m = std::max(m, wps.back().time);
  }
  return m;
}

Schedule extract_schedule(const AugmentedTpg& aug, const std::vector<double>& times,
                          const Kinematics& kin) {
  if (times.size() != aug.nodes.size() + 1) {
    throw InputError("one time per STN event required");
  }
  Schedule schedule;
  schedule.robots.resize(aug.chains.size());
  for (size_t r = 0; r < aug.chains.size(); ++r) {
    for (int id : aug.chains[r]) {
      const EventNode& node = aug.nodes[static_cast<size_t>(id)];
      const double omega = kin.omega_max(node.robot);
      Waypoint wp;
      wp.pos = node.pos;
      wp.time = times[static_cast<size_t>(stn_event(id))];
      wp.vertex = node.kind == EventNode::Kind::arrival ? node.vertex : kNoVertex;
      wp.dwell = std::isfinite(omega) && node.turn_angle > 0.0
                     ? node.turn_angle / omega
                     : 0.0;
      schedule.robots[r].push_back(wp);
    }
  }
  return schedule;
}

namespace {

// Augment/build/solve at one delta; nullopt when inconsistent (only possible
// under a finite cap).
std::optional<PostResult> try_delta(const Tpg& tpg, const Graph& graph,
                                    const PostConfig& cfg, double delta) {
  PostResult out;
  out.tpg = tpg;
  out.delta = delta;
  out.aug = augment_tpg(tpg, delta, graph);
  StnOptions opt;
  opt.epsilon = cfg.epsilon;
  opt.makespan_deadline = cfg.makespan_cap;
  out.stn = build_stn(out.aug, cfg.kin, opt);
  StnSolution sol = solve_stn_earliest(out.stn);
  if (!sol.consistent) return std::nullopt;
  out.times = std::move(sol.times);
  out.schedule = extract_schedule(out.aug, out.times, cfg.kin);
  return out;
}

}  // namespace

PostResult maximize_safety(const Tpg& tpg, const Graph& graph, const PostConfig& cfg) {
  std::optional<PostResult> base = try_delta(tpg, graph, cfg, 0.0);
  if (!base) {
    throw InputError("makespan cap is below the delta = 0 makespan");
  }
  const double hi_limit = max_delta(tpg, graph);
  if (std::optional<PostResult> at_max = try_delta(tpg, graph, cfg, hi_limit)) {
    return std::move(*at_max);  // monotone feasibility: the limit is the answer
  }
  double lo = 0.0, hi = hi_limit;
  PostResult best = std::move(*base);
  while (hi - lo > cfg.search_tol) {
    const double mid = (lo + hi) / 2.0;
    if (std::optional<PostResult> r = try_delta(tpg, graph, cfg, mid)) {
      best = std::move(*r);
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

PostResult post_process(const DiscretePlan& plan, const Graph& graph,
                        const PostConfig& cfg) {
  Tpg tpg = build_tpg(plan, graph);
  if (cfg.mode == PostConfig::Mode::max_safety) {
    return maximize_safety(tpg, graph, cfg);
  }
  PostResult out;
  out.tpg = std::move(tpg);
  out.delta = cfg.delta;
  out.aug = augment_tpg(out.tpg, cfg.delta, graph);
  StnOptions opt;
  opt.epsilon = cfg.epsilon;
  opt.makespan_deadline = cfg.makespan_cap;
  out.stn = build_stn(out.aug, cfg.kin, opt);
  StnSolution sol = solve_stn_earliest(out.stn);
  if (!sol.consistent) {
    throw StnInconsistentError("no schedule satisfies the temporal constraints",
                               std::move(sol.cycle));
  }
  out.times = std::move(sol.times);
  out.schedule = extract_schedule(out.aug, out.times, cfg.kin);
  return out;
}

}  // namespace mrplan
