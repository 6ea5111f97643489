#include "mrplan/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <utility>

#include "mrplan/stn.hpp"
#include "mrplan/tpg.hpp"

namespace mrplan {

double controller_speed(double remaining_distance, double time_to_go, double v_max,
                        double dt) {
  if (remaining_distance < 0.0) {
    throw InputError("remaining distance must be nonnegative");
  }
  if (time_to_go <= 0.0) return v_max;  // due or overdue: full speed
  const double v = remaining_distance / std::max(time_to_go, dt);
  return std::clamp(v, 0.0, v_max);
}

namespace {

constexpr double kSnap = 1e-9;      // m; residual treated as "on the waypoint"
constexpr double kTimeEps = 1e-12;  // s; budget considered exhausted below this
constexpr double kGateSlop = 1e-12;  // permitted epsilon shortfall at a gate

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [0, 1), a fixed function of (seed, robot, tick): the draw set a
// robot sees is independent of everything else that happens, so raising p
// keeps every previously delayed tick delayed (common random numbers).
double delay_draw(std::uint64_t seed, RobotId robot, long tick) {
  std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC909ull);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(robot)) +
                      0x9E3779B97F4A7C15ull));
  h = splitmix64(h ^ static_cast<std::uint64_t>(tick));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct WaypointArrays {
  std::vector<Vec2> pos;
  std::vector<double> time;   // scheduled arrival
  std::vector<int> event;     // STN event id, -1 for transit waypoints
  std::vector<double> dwell;  // s spent turning before departing
  std::vector<VertexId> vert;  // occupied vertex, kNoVertex for markers
  std::vector<double> seg_len;  // arc metres between consecutive waypoints
  std::vector<double> seg_cap;  // speed limit, <= 0 for unlimited

  size_t size() const { return pos.size(); }
};

WaypointArrays chain_arrays(const AugmentedTpg& aug, const std::vector<double>& times,
                            double omega_max, int r) {
  WaypointArrays a;
  const auto& chain = aug.chains[static_cast<size_t>(r)];
  a.pos.reserve(chain.size());
  for (int id : chain) {
    const EventNode& node = aug.nodes[static_cast<size_t>(id)];
    a.pos.push_back(node.pos);
    a.time.push_back(times[static_cast<size_t>(stn_event(id))]);
    a.event.push_back(stn_event(id));
    a.dwell.push_back(std::isfinite(omega_max) && node.turn_angle > 0.0
                          ? node.turn_angle / omega_max
                          : 0.0);
    a.vert.push_back(node.kind == EventNode::Kind::arrival ? node.vertex : kNoVertex);
  }
  for (const ChainSeg& seg : aug.segs[static_cast<size_t>(r)]) {
    a.seg_len.push_back(seg.length);
    a.seg_cap.push_back(seg.speed_limit);
  }
  return a;
}

struct RobotSim {
  RobotId id = 0;
  double v_max = 1.0;
  double omega_max = kUnbounded;
  double p = 0.0;
  double f = 1.0;
  VertexId final_target = kNoVertex;
  WaypointArrays wps;
  int wp = 0;             // last reached waypoint index
  double progress = 0.0;  // arc metres into segment wp -> wp+1
  double ready_time = 0.0;  // departure allowed from this time (dwell)
  bool done = false;
  double done_time = 0.0;
  Vec2 cur{0.0, 0.0};
  bool delayed_now = false;

  double seg_speed(int seg) const {
    const double cap = wps.seg_cap[static_cast<size_t>(seg)];
    return cap > 0.0 ? std::min(v_max, cap) : v_max;
  }
  void place() {
    if (done || wp + 1 >= static_cast<int>(wps.size())) {
      cur = wps.pos[static_cast<size_t>(wp)];
      return;
    }
    const double len = wps.seg_len[static_cast<size_t>(wp)];
    const Vec2& a = wps.pos[static_cast<size_t>(wp)];
    const Vec2& b = wps.pos[static_cast<size_t>(wp + 1)];
    const double t = len > 0.0 ? std::clamp(progress / len, 0.0, 1.0) : 0.0;
    cur = Vec2{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
  }
};

struct Sim {
  const Graph& graph;
  const PostConfig& post_cfg;
  const SimConfig& cfg;
  double delta;  // spacing actually planned for (from the post result)

  AugmentedTpg aug;
  Stn stn;
  std::vector<double> times;
  std::vector<double> slack;
  std::vector<double> occurred;            // per event; < 0 until it happens
  std::vector<std::vector<int>> preds_ev;  // inter-arc predecessors per event
  bool any_finite_slack = false;

  std::vector<RobotSim> bots;
  std::vector<Vec2> snap;  // start-of-tick positions, for the envelope
  double clock = 0.0;
  double last_resolve = -kUnbounded;
  Metrics metrics;
  std::vector<TrajectoryRow> log;
  std::string failure;

  Sim(const Graph& g, const PostConfig& pc, const SimConfig& c)
      : graph(g), post_cfg(pc), cfg(c), delta(0.0) {}

  void adopt(AugmentedTpg&& new_aug, Stn&& new_stn, std::vector<double>&& new_times) {
    aug = std::move(new_aug);
    stn = std::move(new_stn);
    times = std::move(new_times);
    slack = stn_slack(stn, times);
    any_finite_slack = false;
    for (double s : slack) {
      if (s != kUnbounded) any_finite_slack = true;
    }
    occurred.assign(static_cast<size_t>(stn.events), -1.0);
    occurred[0] = 0.0;
    preds_ev.assign(static_cast<size_t>(stn.events), {});
    for (const AugmentedTpg::InterArc& arc : aug.inter) {
      preds_ev[static_cast<size_t>(stn_event(arc.to))].push_back(stn_event(arc.from));
    }
  }

  bool gate_open(const RobotSim& b, int k, double t) const {
    const int e = b.wps.event[static_cast<size_t>(k)];
    if (e < 0) return true;
    for (int p : preds_ev[static_cast<size_t>(e)]) {
      const double occ = occurred[static_cast<size_t>(p)];
      if (occ < 0.0 || occ + post_cfg.epsilon > t + kGateSlop) return false;
    }
    return true;
  }

  // Arc metres this robot may advance along its own route before coming
  // within delta of another robot standing on that route. Marker gates order
  // ball entries but put no floor on mid-edge gaps, so a follower tracking a
  // tight schedule (or sprinting when overdue) would otherwise close on, or
  // drive through, a slower robot ahead.
  double free_ahead(const RobotSim& b, size_t self) const {
    if (delta <= 0.0 || b.done) return kUnbounded;
    const double window = delta + b.v_max * cfg.dt + 1e-6;
    double free = kUnbounded;
    double acc = -b.progress;  // arc metres from b to the segment's start
    for (int s = b.wp; s + 1 < static_cast<int>(b.wps.size()); ++s) {
      const double len = b.wps.seg_len[static_cast<size_t>(s)];
      const Vec2& a = b.wps.pos[static_cast<size_t>(s)];
      const Vec2& q = b.wps.pos[static_cast<size_t>(s + 1)];
      const double ex = q.x - a.x;
      const double ey = q.y - a.y;
      const double e2 = ex * ex + ey * ey;
      if (e2 > 1e-18 && len > 0.0) {
        for (size_t o = 0; o < bots.size(); ++o) {
          if (o == self) continue;
          const Vec2& c = snap[o];
          const double t =
              std::clamp(((c.x - a.x) * ex + (c.y - a.y) * ey) / e2, 0.0, 1.0);
          const double dx = c.x - (a.x + ex * t);
          const double dy = c.y - (a.y + ey * t);
          if (dx * dx + dy * dy > 1e-12) continue;  // off this segment
          const double ahead = acc + t * len;
          if (ahead > 1e-9) free = std::min(free, ahead - delta);
        }
      }
      acc += len;
      if (acc >= window) break;
    }
    return std::max(free, 0.0);
  }

  void arrive(RobotSim& b, double t) {
    b.wp += 1;
    b.progress = 0.0;
    const int e = b.wps.event[static_cast<size_t>(b.wp)];
    if (e >= 0 && occurred[static_cast<size_t>(e)] < 0.0) {
      occurred[static_cast<size_t>(e)] = t;
    }
    b.ready_time = t + b.wps.dwell[static_cast<size_t>(b.wp)];
    if (b.wp + 1 == static_cast<int>(b.wps.size())) {
      b.done = true;
      b.done_time = t;
    }
  }

  // One robot, one tick of length cfg.dt starting at t0. Walks waypoint
  // boundaries inside the tick so stamps are not quantised to tick edges.
  // cap bounds the total arc advance (the envelope from free_ahead).
  void step_robot(RobotSim& b, double t0, double factor, double cap) {
    double now = t0;
    double budget = cfg.dt;
    while (!b.done && budget > kTimeEps) {
      if (b.progress == 0.0 && now < b.ready_time) {  // finish turning first
        const double wait = std::min(b.ready_time - now, budget);
        now += wait;
        budget -= wait;
        continue;
      }
      const int seg = b.wp;
      const double remaining = b.wps.seg_len[static_cast<size_t>(seg)] - b.progress;
      if (remaining <= kSnap) {  // on the waypoint; only the gate can hold us
        if (gate_open(b, b.wp + 1, now)) {
          arrive(b, now);
          continue;
        }
        b.progress = b.wps.seg_len[static_cast<size_t>(seg)];
        return;
      }
      if (cap <= kSnap) return;  // envelope: hold behind the robot ahead
      const double v_cap = b.seg_speed(seg);
      const double ttg = b.wps.time[static_cast<size_t>(b.wp + 1)] - now;
      const double cmd = controller_speed(remaining, ttg, v_cap, cfg.dt) * factor;
      if (cmd <= 1e-12) return;  // stopped (full stop, or f == 0 delay)
      const double adv = std::min({cmd * budget, remaining, cap});
      if (adv + kSnap < remaining) {  // stops mid-segment (budget or envelope)
        b.progress += adv;
        return;
      }
      const double span = remaining / cmd;
      const double t_arr = now + span;
      if (!gate_open(b, b.wp + 1, t_arr)) {
        b.progress = b.wps.seg_len[static_cast<size_t>(seg)];  // park on the gate
        return;
      }
      now = t_arr;
      budget -= span;
      cap = std::max(cap - remaining, 0.0);
      arrive(b, t_arr);
    }
  }

  // Physical lower bound on reaching waypoint k: residual dwell, then each
  // segment at its speed cap, plus mandatory turn dwells on the way.
  double lb_arrival(const RobotSim& b, int k, double now) const {
    double t = now;
    if (b.progress == 0.0 && b.ready_time > t) t = b.ready_time;
    double rem = b.wps.seg_len[static_cast<size_t>(b.wp)] - b.progress;
    t += std::max(rem, 0.0) / b.seg_speed(b.wp);
    for (int j = b.wp + 1; j < k; ++j) {
      t += b.wps.dwell[static_cast<size_t>(j)];
      t += b.wps.seg_len[static_cast<size_t>(j)] / b.seg_speed(j);
    }
    return t;
  }

  int next_event_wp(const RobotSim& b) const {
    for (int k = b.wp + 1; k < static_cast<int>(b.wps.size()); ++k) {
      if (b.wps.event[static_cast<size_t>(k)] >= 0) return k;
    }
    return -1;
  }

  bool lateness_exceeds_slack() const {
    for (const RobotSim& b : bots) {
      if (b.done) continue;
      const int k = next_event_wp(b);
      if (k < 0) continue;
      const int e = b.wps.event[static_cast<size_t>(k)];
      const double s = slack[static_cast<size_t>(e)];
      if (s == kUnbounded) continue;
      if (lb_arrival(b, k, clock) > times[static_cast<size_t>(e)] + s + 1e-6) {
        return true;
      }
    }
    return false;
  }

  // Anchored copy of the current STN: occurred events pinned to their stamps,
  // each robot's next event bounded below by the physics of reaching it.
  Stn anchored_stn() const {
    Stn a = stn;
    for (int e = 1; e < stn.events; ++e) {
      const double occ = occurred[static_cast<size_t>(e)];
      if (occ >= 0.0) a.arcs.push_back({0, e, occ, occ});
    }
    for (const RobotSim& b : bots) {
      if (b.done) continue;
      const int k = next_event_wp(b);
      if (k < 0) continue;
      const int e = b.wps.event[static_cast<size_t>(k)];
      a.arcs.push_back({0, e, lb_arrival(b, k, clock), kUnbounded});
    }
    return a;
  }

  void adopt_times(const Stn& basis, std::vector<double>&& new_times) {
    times = std::move(new_times);
    slack = stn_slack(basis, times);
    any_finite_slack = false;
    for (double s : slack) {
      if (s != kUnbounded) any_finite_slack = true;
    }
    for (RobotSim& b : bots) {
      for (size_t k = 0; k < b.wps.size(); ++k) {
        const int e = b.wps.event[k];
        if (e >= 0) b.wps.time[k] = times[static_cast<size_t>(e)];
      }
    }
  }

  // Tier 3: plan a fresh discrete problem from per-robot handover vertices,
  // rebuild spacing + schedule with release offsets covering the transit, and
  // splice each robot's remaining transit waypoints in front of its new chain.
  bool mapf_replan() {
    metrics.replans += 1;
    struct Head {
      int wp = 0;        // waypoint index of the handover vertex
      bool at = false;   // already standing on it
    };
    std::vector<Head> heads(bots.size());
    std::vector<RobotSpec> specs;
    specs.reserve(bots.size());
    std::unordered_map<VertexId, int> seen;
    for (size_t r = 0; r < bots.size(); ++r) {
      const RobotSim& b = bots[r];
      int k;
      if (b.done) {
        k = static_cast<int>(b.wps.size()) - 1;
      } else if (b.progress == 0.0 &&
                 b.wps.vert[static_cast<size_t>(b.wp)] != kNoVertex) {
        k = b.wp;
      } else {
        k = b.wp + 1;
        while (b.wps.vert[static_cast<size_t>(k)] == kNoVertex) ++k;
      }
      heads[r].wp = k;
      heads[r].at = b.done || (k == b.wp && b.progress == 0.0);
      const VertexId head_v = b.wps.vert[static_cast<size_t>(k)];
      if (!seen.emplace(head_v, static_cast<int>(r)).second) {
        failure = "re-plan handover vertices collide";
        return false;
      }
      specs.push_back({b.id, head_v, b.final_target});
    }

    std::vector<double> releases(bots.size(), 0.0);
    for (size_t r = 0; r < bots.size(); ++r) {
      const RobotSim& b = bots[r];
      releases[r] = heads[r].at ? clock : lb_arrival(b, heads[r].wp, clock);
    }

    MapfInstance inst{graph, std::move(specs)};
    const HighwaySet* hw = cfg.replan.highways.empty() ? nullptr : &cfg.replan.highways;
    PlanResult res = plan_ecbs(inst, Objective::makespan, cfg.replan.w, hw,
                               cfg.replan.timeout_s);
    if (res.status == PlanStatus::timeout) {
      failure = "re-plan timed out";
      return false;
    }
    if (res.status != PlanStatus::ok) {
      failure = "re-plan infeasible";
      return false;
    }
    std::unordered_map<RobotId, const RobotPath*> by_id;
    for (const RobotPath& rp : res.plan.robots) by_id.emplace(rp.id, &rp);
    DiscretePlan ordered;
    for (const RobotSim& b : bots) ordered.robots.push_back(*by_id.at(b.id));

    AugmentedTpg aug2;
    Stn stn2;
    StnSolution sol2;
    try {
      Tpg tpg2 = build_tpg(ordered, graph);
      aug2 = augment_tpg(tpg2, delta, graph);
      StnOptions opt;
      opt.epsilon = post_cfg.epsilon;
      opt.makespan_deadline = post_cfg.makespan_cap;
      opt.release_offsets = &releases;
      stn2 = build_stn(aug2, post_cfg.kin, opt);
      sol2 = solve_stn_earliest(stn2);
    } catch (const InputError& err) {
      failure = std::string("re-plan post-processing failed: ") + err.what();
      return false;
    }
    if (!sol2.consistent) {
      failure = "re-planned schedule cannot meet the deadline";
      return false;
    }

    // Keep each robot's residual transit (current position to the handover
    // vertex) as ungated waypoints, paced to land on the new schedule.
    std::vector<WaypointArrays> rebuilt(bots.size());
    for (size_t r = 0; r < bots.size(); ++r) {
      const RobotSim& b = bots[r];
      WaypointArrays chain = chain_arrays(aug2, sol2.times, b.omega_max,
                                          static_cast<int>(r));
      if (heads[r].at) {
        rebuilt[r] = std::move(chain);
        continue;
      }
      WaypointArrays w;
      w.pos.push_back(b.cur);
      w.time.push_back(clock);
      w.event.push_back(-1);
      w.dwell.push_back(0.0);
      w.vert.push_back(kNoVertex);
      w.seg_len.push_back(b.wps.seg_len[static_cast<size_t>(b.wp)] - b.progress);
      w.seg_cap.push_back(b.wps.seg_cap[static_cast<size_t>(b.wp)]);
      for (int j = b.wp + 1; j < heads[r].wp; ++j) {
        w.pos.push_back(b.wps.pos[static_cast<size_t>(j)]);
        w.event.push_back(-1);
        w.dwell.push_back(0.0);
        w.vert.push_back(kNoVertex);
        w.seg_len.push_back(b.wps.seg_len[static_cast<size_t>(j)]);
        w.seg_cap.push_back(b.wps.seg_cap[static_cast<size_t>(j)]);
        w.time.push_back(0.0);  // paced below
      }
      const double t_head = chain.time.front();
      double total = 0.0;
      for (size_t j = 0; j < w.seg_len.size(); ++j) total += w.seg_len[j];
      double cum = 0.0;
      for (size_t j = 1; j < w.pos.size(); ++j) {
        cum += w.seg_len[j - 1];
        w.time[j] = total > 0.0 ? clock + (t_head - clock) * (cum / total)
                                : clock;
      }
      w.pos.insert(w.pos.end(), chain.pos.begin(), chain.pos.end());
      w.time.insert(w.time.end(), chain.time.begin(), chain.time.end());
      w.event.insert(w.event.end(), chain.event.begin(), chain.event.end());
      w.dwell.insert(w.dwell.end(), chain.dwell.begin(), chain.dwell.end());
      w.vert.insert(w.vert.end(), chain.vert.begin(), chain.vert.end());
      w.seg_len.insert(w.seg_len.end(), chain.seg_len.begin(), chain.seg_len.end());
      w.seg_cap.insert(w.seg_cap.end(), chain.seg_cap.begin(), chain.seg_cap.end());
      rebuilt[r] = std::move(w);
    }

    adopt(std::move(aug2), std::move(stn2), std::move(sol2.times));
    for (size_t r = 0; r < bots.size(); ++r) {
      RobotSim& b = bots[r];
      const bool was_done = b.done;
      const double old_done_time = b.done_time;
      b.wps = std::move(rebuilt[r]);
      b.wp = 0;
      b.progress = 0.0;
      b.ready_time = clock;
      b.done = b.wps.size() == 1;
      if (heads[r].at) {
        const int e = b.wps.event[0];
        if (e >= 0 && occurred[static_cast<size_t>(e)] < 0.0) {
          occurred[static_cast<size_t>(e)] = clock;
        }
        if (b.done) {
          b.done_time = was_done ? old_done_time : clock;
        }
      }
      b.place();
    }
    return true;
  }

  void sample_distances() {
    for (size_t i = 0; i < bots.size(); ++i) {
      for (size_t j = i + 1; j < bots.size(); ++j) {
        const double d = distance(bots[i].cur, bots[j].cur);
        if (metrics.min_pairwise_distance_m < 0.0 ||
            d < metrics.min_pairwise_distance_m) {
          metrics.min_pairwise_distance_m = d;
        }
      }
    }
  }

  void log_rows() {
    if (!cfg.log_trajectory) return;
    for (size_t r = 0; r < bots.size(); ++r) {
      const RobotSim& b = bots[r];
      log.push_back({clock, static_cast<int>(b.id), b.cur.x, b.cur.y, b.wp,
                     b.delayed_now});
    }
  }
};

void check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw InputError("dt must be positive and finite");
  }
  if (!(cfg.arrival_tol >= 0.0)) throw InputError("arrival tolerance must be >= 0");
  if (!(cfg.resolve_min_gap >= 0.0)) {
    throw InputError("re-solve rate limit must be >= 0");
  }
  if (!(cfg.replan.w >= 1.0)) throw InputError("re-plan suboptimality must be >= 1");
  auto check_pf = [](double p, double f, RobotId robot) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputError("delay probability of robot " + std::to_string(robot) +
                       " must lie in [0, 1]");
    }
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InputError("delay speed factor of robot " + std::to_string(robot) +
                       " must lie in [0, 1]");
    }
  };
  check_pf(cfg.delays.p, cfg.delays.f, -1);
  for (const DelayModel::Override& o : cfg.delays.overrides) {
    check_pf(o.p, o.f, o.robot);
  }
  for (const DelayModel::FullStop& s : cfg.delays.stops) {
    if (!(s.t_end >= s.t_begin) || !(s.t_begin >= 0.0)) {
      throw InputError("full stop of robot " + std::to_string(s.robot) +
                       " must have 0 <= t_begin <= t_end");
    }
  }
}

}  // namespace

RunResult simulate(const Graph& graph, const DiscretePlan& plan,
                   const PostConfig& post_cfg, const PostResult& post,
                   const SimConfig& cfg) {
  const auto wall_start = std::chrono::steady_clock::now();
  check_config(cfg);
  if (post.aug.chains.size() != plan.robots.size()) {
    throw InputError("post-processing result does not match the plan");
  }

  Sim sim(graph, post_cfg, cfg);
  sim.delta = post.delta;
  sim.adopt(AugmentedTpg(post.aug), Stn(post.stn), std::vector<double>(post.times));

  sim.bots.resize(plan.robots.size());
  for (size_t r = 0; r < plan.robots.size(); ++r) {
    RobotSim& b = sim.bots[r];
    b.id = plan.robots[r].id;
    b.v_max = post_cfg.kin.v_max(b.id);
    b.omega_max = post_cfg.kin.omega_max(b.id);
    b.p = cfg.delays.p;
    b.f = cfg.delays.f;
    for (const DelayModel::Override& o : cfg.delays.overrides) {
      if (o.robot == b.id) {
        b.p = o.p;
        b.f = o.f;
      }
    }
    b.final_target = plan.robots[r].seq.back();
    b.wps = chain_arrays(sim.aug, sim.times, b.omega_max, static_cast<int>(r));
    const int e0 = b.wps.event[0];
    if (e0 >= 0) sim.occurred[static_cast<size_t>(e0)] = 0.0;
    b.ready_time = b.wps.dwell[0];
    b.done = b.wps.size() == 1;
    b.done_time = 0.0;
    b.place();
  }

  const double schedule_end = *std::max_element(sim.times.begin(), sim.times.end());
  const long max_ticks =
      cfg.max_ticks ? *cfg.max_ticks
                    : static_cast<long>(std::ceil((schedule_end * 5.0 + 120.0) / cfg.dt));

  sim.sample_distances();
  sim.log_rows();

  bool all_done = true;
  for (const RobotSim& b : sim.bots) all_done = all_done && b.done;

  bool timed_out = false;
  for (long tick = 0; !all_done && sim.failure.empty(); ++tick) {
    if (tick >= max_ticks) {
      sim.failure = "tick budget exhausted before all robots arrived";
      timed_out = true;
      break;
    }
    const double t0 = static_cast<double>(tick) * cfg.dt;
    sim.snap.resize(sim.bots.size());
    for (size_t r = 0; r < sim.bots.size(); ++r) sim.snap[r] = sim.bots[r].cur;
    for (size_t r = 0; r < sim.bots.size(); ++r) {
      RobotSim& b = sim.bots[r];
      if (b.done) {
        b.delayed_now = false;
        continue;
      }
      bool stopped = false;
      for (const DelayModel::FullStop& s : cfg.delays.stops) {
        if (s.robot == b.id && t0 >= s.t_begin && t0 < s.t_end) stopped = true;
      }
      const bool delayed = delay_draw(cfg.seed, b.id, tick) < b.p;
      b.delayed_now = delayed || stopped;
      const double factor = stopped ? 0.0 : (delayed ? b.f : 1.0);
      if (factor > 0.0 || b.progress == 0.0) {
        sim.step_robot(b, t0, factor, sim.free_ahead(b, r));
      }
      b.place();
    }
    sim.clock = static_cast<double>(tick + 1) * cfg.dt;
    sim.sample_distances();
    sim.log_rows();

    all_done = true;
    for (const RobotSim& b : sim.bots) all_done = all_done && b.done;
    if (all_done) break;

    if (sim.any_finite_slack && sim.lateness_exceeds_slack() &&
        sim.clock - sim.last_resolve >= cfg.resolve_min_gap) {
      sim.last_resolve = sim.clock;
      sim.metrics.stn_resolves += 1;
      Stn anchored = sim.anchored_stn();
      StnSolution sol = solve_stn_earliest(anchored);
      if (sol.consistent) {
        sim.adopt_times(anchored, std::move(sol.times));
      } else if (!sim.mapf_replan()) {
        break;  // failure recorded
      }
    }
  }

  // Safety audit: within one tick of motion the sampled gap may undershoot
  // delta, but never by more than v_max * dt. Anything below that is a fault.
  if (sim.failure.empty() && sim.delta > 0.0 &&
      sim.metrics.min_pairwise_distance_m >= 0.0) {
    double v_top = 0.0;
    for (const RobotSim& b : sim.bots) v_top = std::max(v_top, b.v_max);
    if (sim.metrics.min_pairwise_distance_m < sim.delta - v_top * cfg.dt - 1e-9) {
      sim.failure = "safety distance violated during execution";
    }
  }

  RunResult out;
  out.ok = sim.failure.empty();
  out.timed_out = timed_out;
  out.failure = sim.failure;
  out.metrics = sim.metrics;
  double sum = 0.0;
  for (const RobotSim& b : sim.bots) sum += b.done ? b.done_time : sim.clock;
  out.metrics.avg_time_to_target_s =
      sim.bots.empty() ? 0.0 : sum / static_cast<double>(sim.bots.size());
  out.metrics.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
          .count();
  out.log = std::move(sim.log);
  return out;
}

}  // namespace mrplan
