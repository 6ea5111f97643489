#pragma once

#include <optional>
#include <vector>

#include "mrplan/stn.hpp"

namespace mrplan {

struct Waypoint {
  Vec2 pos;
  double time = 0.0;            // arrival, seconds
  VertexId vertex = kNoVertex;  // kNoVertex for safety markers
  double dwell = 0.0;           // in-place rotation after arriving, seconds
};

// Arrival times per robot along its (marker-including) waypoint list; the
// robot moves at constant velocity between consecutive waypoints.
struct Schedule {
  std::vector<std::vector<Waypoint>> robots;
  double makespan() const;
};

// Pairs each augmented-TPG chain node with its solved time. The dwell at a
// waypoint is its rotation time under the robot's omega_max.
Schedule extract_schedule(const AugmentedTpg& aug, const std::vector<double>& times,
                          const Kinematics& kin);

// Thrown when no schedule exists; carries the certificate cycle.
class StnInconsistentError : public std::runtime_error {
 public:
  StnInconsistentError(const std::string& what, std::vector<int> cycle)
      : std::runtime_error(what), cycle(std::move(cycle)) {}
  std::vector<int> cycle;  // STN event ids forming a negative cycle
};

struct PostConfig {
  enum class Mode { min_makespan, max_safety };
  Mode mode = Mode::min_makespan;
  double delta = 0.0;    // safety distance; ignored under max_safety
  double epsilon = 0.01; // inter-robot separation, seconds
  Kinematics kin;
  std::optional<double> makespan_cap;  // upper bound on every final event
  double search_tol = 1e-3;            // delta binary-search tolerance, meters
};

struct PostResult {
  Tpg tpg;
  AugmentedTpg aug;
  Stn stn;
  std::vector<double> times;  // earliest, per STN event
  Schedule schedule;
  double delta = 0.0;  // the safety distance in effect
};

// Largest delta (within search_tol) whose earliest schedule stays within the
// cap, by binary search over [0, max_delta]; feasibility is monotone because
// growing delta only lengthens paths through the marker arcs. An absent cap
// accepts the upper limit outright. Throws InputError when the cap is below
// the delta = 0 makespan.
PostResult maximize_safety(const Tpg& tpg, const Graph& graph, const PostConfig& cfg);

// plan -> TPG -> markers -> STN -> earliest schedule, or the delta search
// under max_safety. Throws StnInconsistentError when no schedule exists and
// DeltaBoundError / InputError on bad parameters.
PostResult post_process(const DiscretePlan& plan, const Graph& graph,
                        const PostConfig& cfg);

}  // namespace mrplan
