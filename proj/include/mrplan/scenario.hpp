#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrplan/cbs.hpp"
#include "mrplan/json_io.hpp"
#include "mrplan/schedule.hpp"
#include "mrplan/simulator.hpp"

namespace mrplan {

struct PlannerConfig {
  enum class Kind { cbs, ecbs, cbm };
  enum class HighwayMode { none, automatic, explicit_list };

  Kind kind = Kind::ecbs;
  Objective objective = Objective::makespan;
  double w = 1.5;
  HighwayMode highway_mode = HighwayMode::none;
  std::vector<std::pair<VertexId, VertexId>> highway_arcs;
  std::optional<double> timeout_s;
};

// One self-contained experiment: an instance (inline or referenced by path),
// the planner to run on it, and the post-processing and execution settings.
struct Scenario {
  InstanceDoc instance;
  PlannerConfig planner;
  PostConfig post;
  SimConfig sim;
};

Scenario scenario_from_json(const nlohmann::json& doc,
                            const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

// none -> empty set; automatic -> majority directions of the independent
// shortest paths; explicit -> the listed arcs (validated against the graph).
HighwaySet resolve_highways(const Scenario& scenario);

// Dispatches to the configured planner. Highways demand ecbs (the only
// planner with a cost model for them); cbm demands teams and the makespan
// objective; cbs/ecbs demand fixed-target robots.
PlanResult run_planner(const Scenario& scenario, const HighwaySet& highways);

struct PipelineResult {
  PlanResult plan;
  double planning_time_s = 0.0;
  std::optional<PostResult> post;  // set when post-processing was requested
  std::optional<RunResult> run;    // set when simulation was requested
};

// plan -> post-process -> simulate, stopping at the requested stage or on
// the first failure. Post-processing errors propagate as exceptions
// (DeltaBoundError, StnInconsistentError, InputError).
PipelineResult run_pipeline(const Scenario& scenario, bool do_post, bool do_sim);

}  // namespace mrplan
