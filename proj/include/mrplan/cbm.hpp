#pragma once

#include <optional>
#include <vector>

#include "mrplan/cbs.hpp"
#include "mrplan/flow.hpp"
#include "mrplan/instance.hpp"

namespace mrplan {

// assignment[k][i] is the index into teams[k].targets assigned to
// teams[k].starts[i].
using TeamAssignment = std::vector<std::vector<int>>;

// Per team, an assignment minimizing the maximum start->target hop distance
// (the makespan lower bound used to seed iterative deepening). Throws
// InputError if some team admits no complete assignment.
TeamAssignment bottleneck_assignment(const TapfInstance& instance);

// Freezes an assignment into a MAPF instance. Robot ids are assigned
// sequentially in team listing order, then start order within the team.
// Throws InputError if the assignment is not a per-team bijection.
MapfInstance tapf_to_mapf(const TapfInstance& instance,
                          const TeamAssignment& assignment);

// Optimal-makespan team planning: iterative deepening on the horizon T
// starting at the bottleneck-assignment bound; at each T a conflict tree
// whose nodes hold per-team prohibition sets, whose leaves route each team
// with plan_team_flow, and which branches on the earliest inter-team
// conflict. The first feasible T is returned, so the makespan is optimal.
PlanResult plan_cbm(const TapfInstance& instance,
                    std::optional<double> timeout_s = std::nullopt);

}  // namespace mrplan
