#include "mrplan/stn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrplan {
namespace {

constexpr double kTol = 1e-9;

void check_velocity(double v, const char* what, RobotId robot) {
  if (!(v > 0.0)) {
    throw InputError(std::string(what) + " of robot " + std::to_string(robot) +
                     " must be positive");
  }
}

// Single-source shortest paths over (from, to, weight) arcs with possible
// negative weights. Returns false and fills `cycle_nodes` when a negative
// cycle is reachable. Deterministic: fixed relaxation order.
struct DistanceArcs {
  std::vector<int> from, to;
  std::vector<double> weight;

  void add(int f, int t, double w) {
    from.push_back(f);
    to.push_back(t);
    weight.push_back(w);
  }
};

bool bellman_ford(int n, const DistanceArcs& arcs, int source,
                  std::vector<double>& dist, std::vector<int>* cycle_nodes) {
  dist.assign(static_cast<size_t>(n), kUnbounded);
  std::vector<int> parent(static_cast<size_t>(n), -1);
  dist[static_cast<size_t>(source)] = 0.0;
  int relaxed_node = -1;
  for (int round = 0; round < n; ++round) {
    relaxed_node = -1;
    for (size_t a = 0; a < arcs.from.size(); ++a) {
      const int f = arcs.from[a], t = arcs.to[a];
      if (dist[static_cast<size_t>(f)] == kUnbounded) continue;
      const double cand = dist[static_cast<size_t>(f)] + arcs.weight[a];
      if (cand < dist[static_cast<size_t>(t)] - kTol) {
        dist[static_cast<size_t>(t)] = cand;
        parent[static_cast<size_t>(t)] = f;
        relaxed_node = t;
      }
    }
    if (relaxed_node == -1) return true;  // converged
  }
  if (cycle_nodes != nullptr) {
    // A relaxation on round n proves a reachable negative cycle; walking n
    // parent steps lands inside it.
    int u = relaxed_node;
    for (int i = 0; i < n; ++i) u = parent[static_cast<size_t>(u)];
    std::vector<int> cycle{u};
    for (int v = parent[static_cast<size_t>(u)]; v != u; v = parent[static_cast<size_t>(v)]) {
      cycle.push_back(v);
    }
    std::reverse(cycle.begin(), cycle.end());  // parent walk visits in reverse
    const auto smallest = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), smallest, cycle.end());
    *cycle_nodes = std::move(cycle);
  }
  return false;
}

// Longest path from the origin over lower bounds, valid when every upper is
// unbounded; nullopt when the arcs are cyclic (the caller falls back to
// Bellman-Ford, which separates zero-weight cycles from real conflicts).
std::optional<std::vector<double>> dag_longest(const Stn& stn) {
  std::vector<int> indegree(static_cast<size_t>(stn.events), 0);
  std::vector<std::vector<int>> out(static_cast<size_t>(stn.events));
  for (size_t a = 0; a < stn.arcs.size(); ++a) {
    out[static_cast<size_t>(stn.arcs[a].from)].push_back(static_cast<int>(a));
    ++indegree[static_cast<size_t>(stn.arcs[a].to)];
  }
  std::vector<int> queue;
  for (int e = 0; e < stn.events; ++e) {
    if (indegree[static_cast<size_t>(e)] == 0) queue.push_back(e);
  }
  std::vector<double> dist(static_cast<size_t>(stn.events), -kUnbounded);
  dist[0] = 0.0;
  size_t processed = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    const int e = queue[static_cast<size_t>(head)];
    ++processed;
    for (int a : out[static_cast<size_t>(e)]) {
      const StnArc& arc = stn.arcs[static_cast<size_t>(a)];
      if (dist[static_cast<size_t>(e)] != -kUnbounded) {
        dist[static_cast<size_t>(arc.to)] = std::max(
            dist[static_cast<size_t>(arc.to)], dist[static_cast<size_t>(e)] + arc.lo);
      }
      if (--indegree[static_cast<size_t>(arc.to)] == 0) queue.push_back(arc.to);
    }
  }
  if (processed != static_cast<size_t>(stn.events)) return std::nullopt;
  for (double& d : dist) {
    if (d == -kUnbounded) d = 0.0;  // unanchored; the caller's re-check decides
  }
  return dist;
}

}  // namespace

Stn build_stn(const AugmentedTpg& aug, const Kinematics& kin, const StnOptions& opt) {
  if (!(opt.epsilon >= 0.0) || !std::isfinite(opt.epsilon)) {
    throw InputError("epsilon must be finite and nonnegative");
  }
  if (opt.makespan_deadline &&
      (!(*opt.makespan_deadline >= 0.0) || !std::isfinite(*opt.makespan_deadline))) {
    throw InputError("makespan deadline must be finite and nonnegative");
  }
  if (opt.release_offsets != nullptr &&
      opt.release_offsets->size() != aug.chains.size()) {
    throw InputError("one release offset per robot required");
  }

  Stn stn;
  stn.events = static_cast<int>(aug.nodes.size()) + 1;
  for (size_t r = 0; r < aug.chains.size(); ++r) {
    const auto& chain = aug.chains[r];
    if (chain.empty()) continue;
    const RobotId robot = aug.nodes[static_cast<size_t>(chain[0])].robot;
    const double v = kin.v_max(robot);
    const double omega = kin.omega_max(robot);
    check_velocity(v, "v_max", robot);
    check_velocity(omega, "omega_max", robot);
    const double release =
        opt.release_offsets != nullptr ? (*opt.release_offsets)[r] : 0.0;
    stn.arcs.push_back(StnArc{0, stn_event(chain[0]), release, kUnbounded});
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
      const EventNode& at = aug.nodes[static_cast<size_t>(chain[i])];
      const ChainSeg& seg = aug.segs[r][i];
      const double v_eff = seg.speed_limit > 0.0 ? std::min(v, seg.speed_limit) : v;
      double lo = seg.length / v_eff;
      if (std::isfinite(omega) && at.turn_angle > 0.0) lo += at.turn_angle / omega;
      stn.arcs.push_back(StnArc{stn_event(chain[i]), stn_event(chain[i + 1]), lo, kUnbounded});
    }
    if (opt.makespan_deadline) {
      stn.arcs.push_back(StnArc{0, stn_event(chain.back()), 0.0, *opt.makespan_deadline});
    }
  }
  for (const auto& arc : aug.inter) {
    stn.arcs.push_back(StnArc{stn_event(arc.from), stn_event(arc.to), opt.epsilon, kUnbounded});
  }
  return stn;
}

StnSolution solve_stn_earliest(const Stn& stn) {
  StnSolution sol;
  const bool all_unbounded =
      std::all_of(stn.arcs.begin(), stn.arcs.end(),
                  [](const StnArc& a) { return !std::isfinite(a.hi); });
  if (all_unbounded) {
    if (auto times = dag_longest(stn)) {
      sol.times = std::move(*times);
    }
  }
  if (sol.times.empty()) {
    // Distance graph D: a->b weight hi, b->a weight -lo. Earliest times are
    // -dist over reversed D from the origin; a negative cycle (same cycles
    // in both orientations) certifies inconsistency.
    DistanceArcs rev;
    for (const StnArc& arc : stn.arcs) {
      rev.add(arc.from, arc.to, -arc.lo);
      if (std::isfinite(arc.hi)) rev.add(arc.to, arc.from, arc.hi);
    }
    std::vector<double> dist;
    std::vector<int> cycle;
    if (!bellman_ford(stn.events, rev, 0, dist, &cycle)) {
      sol.cycle = std::move(cycle);
      return sol;
    }
    sol.times.assign(static_cast<size_t>(stn.events), 0.0);
    for (int e = 0; e < stn.events; ++e) {
      if (dist[static_cast<size_t>(e)] != kUnbounded) {
        sol.times[static_cast<size_t>(e)] = -dist[static_cast<size_t>(e)];
      }
    }
  }
  for (const StnArc& arc : stn.arcs) {  // events unanchored to X0 would surface here
    const double gap =
        sol.times[static_cast<size_t>(arc.to)] - sol.times[static_cast<size_t>(arc.from)];
    if (gap < arc.lo - kTol || gap > arc.hi + kTol) {
      throw InputError("STN event " + std::to_string(arc.to) +
                       " is not anchored to the origin");
    }
  }
  sol.consistent = true;
  return sol;
}

std::vector<double> stn_slack(const Stn& stn, const std::vector<double>& times) {
  if (times.size() != static_cast<size_t>(stn.events)) {
    throw InputError("one time per STN event required");
  }
  for (const StnArc& arc : stn.arcs) {
    const double gap =
        times[static_cast<size_t>(arc.to)] - times[static_cast<size_t>(arc.from)];
    if (gap < arc.lo - kTol || gap > arc.hi + kTol) {
      throw InputError("times violate STN arc " + std::to_string(arc.from) + "->" +
                       std::to_string(arc.to));
    }
  }
  DistanceArcs fwd;
  for (const StnArc& arc : stn.arcs) {
    fwd.add(arc.to, arc.from, -arc.lo);
    if (std::isfinite(arc.hi)) fwd.add(arc.from, arc.to, arc.hi);
  }
  std::vector<double> latest;
  if (!bellman_ford(stn.events, fwd, 0, latest, nullptr)) {
    throw InputError("STN is inconsistent");  // unreachable for satisfied arcs
  }
  std::vector<double> slack(static_cast<size_t>(stn.events), kUnbounded);
  for (int e = 0; e < stn.events; ++e) {
    if (latest[static_cast<size_t>(e)] != kUnbounded) {
      slack[static_cast<size_t>(e)] =
          latest[static_cast<size_t>(e)] - times[static_cast<size_t>(e)];
    }
  }
  return slack;
}

}  // namespace mrplan
