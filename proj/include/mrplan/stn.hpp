#pragma once

#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mrplan/tpg.hpp"

namespace mrplan {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Per-robot velocity limits. Rotation is unbounded unless set; translational
// limits must be positive.
struct Kinematics {
  double default_v_max = 1.0;
  double default_omega_max = kUnbounded;  // rad/s
  std::unordered_map<RobotId, double> v_max_overrides;
  std::unordered_map<RobotId, double> omega_max_overrides;

  double v_max(RobotId r) const {
    const auto it = v_max_overrides.find(r);
    return it != v_max_overrides.end() ? it->second : default_v_max;
  }
  double omega_max(RobotId r) const {
    const auto it = omega_max_overrides.find(r);
    return it != omega_max_overrides.end() ? it->second : default_omega_max;
  }
};

// lo <= t(to) - t(from) <= hi, in seconds; hi = kUnbounded when free.
struct StnArc {
  int from = 0;
  int to = 0;
  double lo = 0.0;
  double hi = kUnbounded;
};

// Event 0 is the global origin X0; augmented-TPG node i is event i + 1.
struct Stn {
  int events = 0;
  std::vector<StnArc> arcs;
};

inline int stn_event(int aug_node) { return aug_node + 1; }

struct StnOptions {
  // Minimum separation on inter-robot arcs; the finite stand-in for
  // "arrives strictly after".
  double epsilon = 0.01;
  // Adds X0 -> (final event of each robot) arcs with this upper bound.
  std::optional<double> makespan_deadline;
  // Lower bound of X0 -> (first event of robot r); defaults to 0. Used to
  // anchor re-solved networks at the current execution time.
  const std::vector<double>* release_offsets = nullptr;
};

// Lower bound of a chain arc is travel time at the effective speed
// min(v_max, edge speed limit) plus the in-place rotation Delta-theta /
// omega_max at the departing event; uppers are unbounded (robots may wait).
// Inter-robot arcs get [epsilon, unbounded). Throws InputError on
// non-positive velocities or malformed options.
Stn build_stn(const AugmentedTpg& aug, const Kinematics& kin,
              const StnOptions& opt = {});

struct StnSolution {
  bool consistent = false;
  std::vector<double> times;  // earliest; times[0] = 0
  std::vector<int> cycle;     // inconsistency certificate: events of a negative cycle
};

// Earliest-time solution: every event time is simultaneously minimal, so the
// makespan is minimal. Longest paths over lower bounds, checked against
// uppers; a negative cycle of the distance graph certifies inconsistency.
StnSolution solve_stn_earliest(const Stn& stn);

// Per-event slack: latest admissible event time minus the given time, with
// all later events free to move. kUnbounded where nothing binds. Throws
// InputError if `times` violates the STN.
std::vector<double> stn_slack(const Stn& stn, const std::vector<double>& times);

}  // namespace mrplan
