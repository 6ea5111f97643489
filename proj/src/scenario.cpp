#include "mrplan/scenario.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "mrplan/cbm.hpp"
#include "mrplan/highways.hpp"

namespace mrplan {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw InputError(what); }

double get_number(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

std::optional<double> get_optional_number(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

// A speed field is either one number for every robot or an object with an
// optional "default" plus per-robot-id entries.
void parse_speeds(const json& post, const char* key, double& def,
                  std::unordered_map<RobotId, double>& overrides) {
  auto it = post.find(key);
  if (it == post.end()) return;
  if (it->is_number()) {
    def = it->get<double>();
    return;
  }
  if (!it->is_object()) {
    fail(std::string("'") + key + "' must be a number or an object");
  }
  for (const auto& [name, value] : it->items()) {
    if (!value.is_number()) fail(std::string("'") + key + "' entries must be numbers");
    if (name == "default") {
      def = value.get<double>();
    } else {
      size_t used = 0;
      int id = 0;
      try {
        id = std::stoi(name, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != name.size()) {
        fail(std::string("'") + key + "' keys must be robot ids or 'default'");
      }
      overrides[static_cast<RobotId>(id)] = value.get<double>();
    }
  }
}

PlannerConfig parse_planner(const json& doc) {
  PlannerConfig cfg;
  const json* planner = nullptr;
  if (auto it = doc.find("planner"); it != doc.end()) planner = &*it;
  if (planner == nullptr) fail("scenario is missing 'planner'");
  const json& p = *planner;

  const auto kind_it = p.find("kind");
  if (kind_it == p.end() || !kind_it->is_string()) {
    fail("planner.kind must be one of cbs | ecbs | cbm");
  }
  const std::string kind = kind_it->get<std::string>();
  if (kind == "cbs") {
    cfg.kind = PlannerConfig::Kind::cbs;
  } else if (kind == "ecbs") {
    cfg.kind = PlannerConfig::Kind::ecbs;
  } else if (kind == "cbm") {
    cfg.kind = PlannerConfig::Kind::cbm;
  } else {
    fail("unknown planner kind '" + kind + "'");
  }

  if (auto it = p.find("objective"); it != p.end()) {
    const std::string obj = it->is_string() ? it->get<std::string>() : std::string();
    if (obj == "makespan") {
      cfg.objective = Objective::makespan;
    } else if (obj == "flowtime") {
      cfg.objective = Objective::flowtime;
    } else {
      fail("planner.objective must be makespan or flowtime");
    }
  }
  cfg.w = get_number(p, "w", 1.5);
  if (!(cfg.w >= 1.0)) fail("planner.w must be >= 1");
  cfg.timeout_s = get_optional_number(p, "timeout_s");

  if (auto it = p.find("highways"); it != p.end()) {
    if (it->is_string()) {
      const std::string mode = it->get<std::string>();
      if (mode == "none") {
        cfg.highway_mode = PlannerConfig::HighwayMode::none;
      } else if (mode == "auto") {
        cfg.highway_mode = PlannerConfig::HighwayMode::automatic;
      } else {
        fail("planner.highways must be none | auto | a list of arcs");
      }
    } else if (it->is_array()) {
      cfg.highway_mode = PlannerConfig::HighwayMode::explicit_list;
      // arcs resolved by the caller once the graph is known
    } else {
      fail("planner.highways must be none | auto | a list of arcs");
    }
  }
  return cfg;
}

PostConfig parse_post(const json& doc) {
  PostConfig cfg;
  auto it = doc.find("post");
  if (it == doc.end()) return cfg;
  const json& p = *it;
  if (!p.is_object()) fail("'post' must be an object");

  if (auto m = p.find("mode"); m != p.end()) {
    const std::string mode = m->is_string() ? m->get<std::string>() : std::string();
    if (mode == "min_makespan") {
      cfg.mode = PostConfig::Mode::min_makespan;
    } else if (mode == "max_safety") {
      cfg.mode = PostConfig::Mode::max_safety;
    } else {
      fail("post.mode must be min_makespan or max_safety");
    }
  }
  cfg.delta = get_number(p, "delta", 0.0);
  cfg.epsilon = get_number(p, "epsilon", cfg.epsilon);
  cfg.search_tol = get_number(p, "search_tol", cfg.search_tol);
  cfg.makespan_cap = get_optional_number(p, "makespan_cap");
  parse_speeds(p, "v_max", cfg.kin.default_v_max, cfg.kin.v_max_overrides);
  parse_speeds(p, "omega_max", cfg.kin.default_omega_max, cfg.kin.omega_max_overrides);
  return cfg;
}

SimConfig parse_sim(const json& doc) {
  SimConfig cfg;
  auto it = doc.find("sim");
  if (it == doc.end()) return cfg;
  const json& s = *it;
  if (!s.is_object()) fail("'sim' must be an object");

  cfg.dt = get_number(s, "dt", cfg.dt);
  cfg.arrival_tol = get_number(s, "arrival_tol", cfg.arrival_tol);
  cfg.resolve_min_gap = get_number(s, "resolve_min_gap", cfg.resolve_min_gap);
  if (auto seed = s.find("seed"); seed != s.end()) {
    if (!seed->is_number_unsigned() && !seed->is_number_integer()) {
      fail("sim.seed must be an integer");
    }
    cfg.seed = seed->get<std::uint64_t>();
  }
  if (auto ticks = s.find("max_ticks"); ticks != s.end() && !ticks->is_null()) {
    if (!ticks->is_number_integer()) fail("sim.max_ticks must be an integer");
    cfg.max_ticks = ticks->get<long>();
  }
  cfg.delays.p = get_number(s, "p", 0.0);
  cfg.delays.f = get_number(s, "f", 1.0);
  if (auto o = s.find("overrides"); o != s.end()) {
    for (const json& row : *o) {
      DelayModel::Override ov;
      ov.robot = static_cast<RobotId>(row.at("robot").get<long long>());
      ov.p = get_number(row, "p", cfg.delays.p);
      ov.f = get_number(row, "f", cfg.delays.f);
      cfg.delays.overrides.push_back(ov);
    }
  }
  if (auto o = s.find("stops"); o != s.end()) {
    for (const json& row : *o) {
      DelayModel::FullStop stop;
      stop.robot = static_cast<RobotId>(row.at("robot").get<long long>());
      stop.t_begin = row.at("t_begin").get<double>();
      stop.t_end = row.at("t_end").get<double>();
      cfg.delays.stops.push_back(stop);
    }
  }
  return cfg;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& err) {
    fail("invalid JSON in '" + path.string() + "': " + err.what());
  }
  return doc;
}

}  // namespace

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail("scenario must be a JSON object");
  Scenario sc;

  const auto inst = doc.find("instance");
  if (inst == doc.end()) fail("scenario is missing 'instance'");
  if (inst->is_string()) {
    const std::filesystem::path p = base_dir / inst->get<std::string>();
    sc.instance = parse_instance(load_json_file(p));
  } else {
    sc.instance = parse_instance(*inst);
  }

  sc.planner = parse_planner(doc);
  if (sc.planner.highway_mode == PlannerConfig::HighwayMode::explicit_list) {
    const bool grid = sc.instance.grid.has_value();
    for (const json& arc : doc.at("planner").at("highways")) {
      if (!arc.is_array() || arc.size() != 2) {
        fail("each explicit highway must be a [from, to] pair");
      }
      sc.planner.highway_arcs.emplace_back(
          resolve_vertex(arc[0], sc.instance.graph, grid),
          resolve_vertex(arc[1], sc.instance.graph, grid));
    }
  }
  sc.post = parse_post(doc);
  sc.sim = parse_sim(doc);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(load_json_file(path), path.parent_path());
}

HighwaySet resolve_highways(const Scenario& scenario) {
  HighwaySet hw;
  switch (scenario.planner.highway_mode) {
    case PlannerConfig::HighwayMode::none:
      break;
    case PlannerConfig::HighwayMode::automatic:
      hw = scenario.instance.is_tapf() ? suggest_highways(scenario.instance.tapf())
                                       : suggest_highways(scenario.instance.mapf());
      break;
    case PlannerConfig::HighwayMode::explicit_list:
      for (const auto& [from, to] : scenario.planner.highway_arcs) {
        hw.add(scenario.instance.graph, from, to);
      }
      break;
  }
  return hw;
}

PlanResult run_planner(const Scenario& scenario, const HighwaySet& highways) {
  const PlannerConfig& p = scenario.planner;
  if (!highways.empty() && p.kind != PlannerConfig::Kind::ecbs) {
    fail("highways need the ecbs planner (its cost model consumes them)");
  }
  switch (p.kind) {
    case PlannerConfig::Kind::cbs:
      return plan_cbs(scenario.instance.mapf(), p.objective, p.timeout_s);
    case PlannerConfig::Kind::ecbs:
      return plan_ecbs(scenario.instance.mapf(), p.objective, p.w,
                       highways.empty() ? nullptr : &highways, p.timeout_s);
    case PlannerConfig::Kind::cbm:
      if (p.objective != Objective::makespan) {
        fail("cbm optimizes makespan only");
      }
      return plan_cbm(scenario.instance.tapf(), p.timeout_s);
  }
  fail("unreachable planner kind");
}

PipelineResult run_pipeline(const Scenario& scenario, bool do_post, bool do_sim) {
  PipelineResult out;
  const HighwaySet highways = resolve_highways(scenario);

  const auto t0 = std::chrono::steady_clock::now();
  out.plan = run_planner(scenario, highways);
  out.planning_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.plan.status != PlanStatus::ok) return out;
  if (!do_post && !do_sim) return out;

  out.post = post_process(out.plan.plan, scenario.instance.graph, scenario.post);
  if (!do_sim) return out;

  SimConfig cfg = scenario.sim;
  cfg.replan.w = scenario.planner.kind == PlannerConfig::Kind::ecbs ? scenario.planner.w
                                                                    : 1.5;
  cfg.replan.highways = highways;
  cfg.replan.timeout_s = scenario.planner.timeout_s;
  out.run = simulate(scenario.instance.graph, out.plan.plan, scenario.post, *out.post,
                     cfg);
  return out;
}

}  // namespace mrplan
