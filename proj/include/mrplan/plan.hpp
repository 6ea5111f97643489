#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrplan/instance.hpp"

namespace mrplan {

// One robot's vertex sequence indexed by timestep 0..T. All sequences in a
// plan share the same length (robots that arrive early repeat their target).
struct RobotPath {
  RobotId id = 0;
  std::vector<VertexId> seq;
};

struct DiscretePlan {
  std::vector<RobotPath> robots;

  int makespan() const;
  // Sum over robots of the last timestep at which the robot moves (0 for a
  // robot that never moves). Waiting at the target after the final move is
  // free unless the robot moves again later.
  int flowtime() const;
  // Last timestep at which robot (by index) changes vertex.
  int settle_time(int robot_index) const;

  void pad_to(int T);
};

// Structural check against the graph and the instance's starts/targets:
// every consecutive pair must be equal or adjacent, first entries must be
// the starts, last entries the targets (any team bijection for TAPF).
// Returns an explanation for the first problem found, nullopt if valid.
std::optional<std::string> plan_structural_error(const DiscretePlan& plan,
                                                 const MapfInstance& instance);
std::optional<std::string> plan_structural_error(const DiscretePlan& plan,
                                                 const TapfInstance& instance);

}  // namespace mrplan
