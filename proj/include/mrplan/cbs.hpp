#pragma once

#include <optional>

#include "mrplan/conflicts.hpp"
#include "mrplan/highways.hpp"
#include "mrplan/plan.hpp"

namespace mrplan {

enum class Objective { makespan, flowtime };

enum class PlanStatus { ok, infeasible, timeout };

struct PlanResult {
  PlanStatus status = PlanStatus::infeasible;
  DiscretePlan plan;          // padded to the makespan; empty unless ok
  double objective_value = 0.0;  // measured on the plan, in plain timesteps
  // Lower bound certified by the search. For highway cost models this is in
  // inflated cost space (identical to plain timesteps without highways).
  double lower_bound = 0.0;
  int high_level_expansions = 0;
};

// Searches cap timesteps at |V| * robots + the makespan lower bound; a search
// that exhausts the tree within the cap reports infeasible.
int horizon_bound(const Graph& graph, int robot_count, int makespan_lb);

// Optimal conflict-based search over a binary conflict tree: best-first on
// cost, branch on the earliest conflict, one constraint per involved robot.
PlanResult plan_cbs(const MapfInstance& instance, Objective objective,
                    std::optional<double> timeout_s = std::nullopt);

// Bounded-suboptimal variant: focal search at both levels (prefer fewer
// conflicts among nodes within w of the lower bound). A highway set inflates
// against-direction action costs by w; the returned objective stays within
// w of the optimum measured in that cost space.
PlanResult plan_ecbs(const MapfInstance& instance, Objective objective, double w,
                     const HighwaySet* highways = nullptr,
                     std::optional<double> timeout_s = std::nullopt);

}  // namespace mrplan
