#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrplan/cbs.hpp"
#include "mrplan/schedule.hpp"

namespace mrplan {

// Time-to-go tracking controller: pace to hit the scheduled arrival, capped
// at v_max; a due or overdue waypoint commands full speed.
double controller_speed(double remaining_distance, double time_to_go, double v_max,
                        double dt = 0.05);

struct DelayModel {
  double p = 0.0;  // per-tick delay probability
  double f = 1.0;  // speed factor while delayed, in [0, 1)

  struct Override {
    RobotId robot = 0;
    double p = 0.0;
    double f = 1.0;
  };
  std::vector<Override> overrides;

  struct FullStop {
    RobotId robot = 0;
    double t_begin = 0.0;
    double t_end = 0.0;  // stop while t in [t_begin, t_end)
  };
  std::vector<FullStop> stops;
};

// Planner parameters reused when execution escalates to a re-plan.
struct ReplanConfig {
  double w = 1.5;
  HighwaySet highways;
  std::optional<double> timeout_s;
};

struct SimConfig {
  double dt = 0.05;
  double arrival_tol = 1e-3;  // m; a robot this close to a waypoint is on it
  std::uint64_t seed = 0;
  DelayModel delays;
  // Tick budget; defaults to a generous multiple of the schedule makespan.
  std::optional<long> max_ticks;
  double resolve_min_gap = 1.0;  // min sim-seconds between STN re-solves
  ReplanConfig replan;
  bool log_trajectory = true;
};

struct TrajectoryRow {
  double t = 0.0;
  int robot = 0;
  double x = 0.0;
  double y = 0.0;
  int waypoint = 0;
  bool delayed = false;
};

struct Metrics {
  double runtime_s = 0.0;                 // wall-clock of the run
  double min_pairwise_distance_m = -1.0;  // -1 with fewer than two robots
  double avg_time_to_target_s = 0.0;
  int stn_resolves = 0;
  int replans = 0;
};

struct RunResult {
  bool ok = false;
  bool timed_out = false;  // tick budget exhausted before all robots arrived
  std::string failure;     // empty when ok; otherwise a structured reason
  Metrics metrics;
  std::vector<TrajectoryRow> log;
};

// Executes a post-processed plan tick by tick: seeded per-(robot, tick)
// delay draws scale the commanded speed; handover events are gated on their
// predecessors having occurred epsilon earlier; a per-tick monitor compares
// projected lateness against STN slack and escalates none -> anchored STN
// re-solve (rate-limited) -> MAPF re-plan. Fully deterministic for a fixed
// seed, apart from the wall-clock metric.
RunResult simulate(const Graph& graph, const DiscretePlan& plan,
                   const PostConfig& post_cfg, const PostResult& post,
                   const SimConfig& cfg);

}  // namespace mrplan
