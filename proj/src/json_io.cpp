#include "mrplan/json_io.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace mrplan {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw InputError(what); }

const json& need(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(std::string(where) + " is missing required key '" + key + "'");
  }
  return *it;
}

double need_number(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

std::string id_string(const json& j, const char* what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  fail(std::string(what) + " must be a string or integer id");
}

Graph parse_graph(const json& g) {
  Graph graph;
  const json& vertices = need(g, "vertices", "graph");
  if (!vertices.is_array()) fail("graph.vertices must be an array");
  for (const json& v : vertices) {
    const std::string name = id_string(need(v, "id", "vertex"), "vertex id");
    const double x = need_number(need(v, "x", "vertex"), "vertex x");
    const double y = need_number(need(v, "y", "vertex"), "vertex y");
    graph.add_vertex(name, {x, y});
  }
  const json& edges = need(g, "edges", "graph");
  if (!edges.is_array()) fail("graph.edges must be an array");
  for (const json& e : edges) {
    const std::string us = id_string(need(e, "u", "edge"), "edge u");
    const std::string vs = id_string(need(e, "v", "edge"), "edge v");
    const auto u = graph.find(us);
    const auto v = graph.find(vs);
    if (!u || !v) fail("edge references unknown vertex '" + (u ? vs : us) + "'");
    double length;
    if (auto it = e.find("length"); it != e.end()) {
      length = need_number(*it, "edge length");
    } else {
      length = distance(graph.pos(*u), graph.pos(*v));
    }
    std::optional<double> cap;
    if (auto it = e.find("speed_limit"); it != e.end()) {
      cap = need_number(*it, "edge speed_limit");
    }
    graph.add_edge(*u, *v, length, cap);
  }
  return graph;
}

std::string grid_text(const json& g) {
  if (g.is_string()) return g.get<std::string>();
  if (g.is_array()) {  // list of rows, for readable scenario files
    std::string text;
    int width = -1;
    for (const json& row : g) {
      if (!row.is_string()) fail("grid rows must be strings");
      const std::string r = row.get<std::string>();
      if (width >= 0 && static_cast<int>(r.size()) != width) {
        fail("grid rows must all have the same width");
      }
      width = static_cast<int>(r.size());
      text += r;
      text += '\n';
    }
    std::ostringstream doc;
    doc << "type octile\nheight " << g.size() << "\nwidth " << width << "\nmap\n"
        << text;
    return doc.str();
  }
  fail("grid must be a map document string or an array of rows");
}

}  // namespace

VertexId resolve_vertex(const json& ref, const Graph& graph, bool from_grid) {
  if (ref.is_array()) {
    if (!from_grid || ref.size() != 2 || !ref[0].is_number_integer() ||
        !ref[1].is_number_integer()) {
      fail("[x, y] vertex references require a grid instance");
    }
    const std::string name =
        std::to_string(ref[0].get<long long>()) + "," +
        std::to_string(ref[1].get<long long>());
    if (auto v = graph.find(name)) return *v;
    fail("grid cell [" + name + "] is not passable");
  }
  if (ref.is_number_integer() && from_grid) {
    const auto v = ref.get<long long>();
    if (v < 0 || v >= graph.vertex_count()) {
      fail("vertex index " + std::to_string(v) + " is out of range");
    }
    return static_cast<VertexId>(v);
  }
  const std::string name = id_string(ref, "vertex reference");
  if (auto v = graph.find(name)) return *v;
  fail("unknown vertex '" + name + "'");
}

MapfInstance InstanceDoc::mapf() const {
  if (robots.empty()) fail("this planner needs an instance with 'robots'");
  return {graph, robots};
}

TapfInstance InstanceDoc::tapf() const {
  if (teams.empty()) fail("this planner needs an instance with 'teams'");
  return {graph, teams};
}

InstanceDoc parse_instance(const json& doc) {
  if (!doc.is_object()) fail("instance must be a JSON object");
  InstanceDoc out;
  const bool has_graph = doc.contains("graph");
  const bool has_grid = doc.contains("grid");
  if (has_graph == has_grid) {
    fail("instance needs exactly one of 'graph' or 'grid'");
  }
  if (has_grid) {
    out.grid = GridMap::parse(grid_text(doc.at("grid")));
    out.graph = out.grid->to_graph();
  } else {
    out.graph = parse_graph(doc.at("graph"));
  }

  const bool has_robots = doc.contains("robots");
  const bool has_teams = doc.contains("teams");
  if (has_robots == has_teams) {
    fail("instance needs exactly one of 'robots' or 'teams'");
  }
  if (has_robots) {
    const json& robots = doc.at("robots");
    if (!robots.is_array()) fail("instance.robots must be an array");
    for (const json& r : robots) {
      RobotSpec spec;
      if (auto it = r.find("id"); it != r.end()) {
        if (!it->is_number_integer()) fail("robot id must be an integer");
        spec.id = static_cast<RobotId>(it->get<long long>());
      } else {
        spec.id = static_cast<RobotId>(out.robots.size());
      }
      spec.start = resolve_vertex(need(r, "start", "robot"), out.graph, has_grid);
      spec.target = resolve_vertex(need(r, "target", "robot"), out.graph, has_grid);
      out.robots.push_back(spec);
    }
  } else {
    const json& teams = doc.at("teams");
    if (!teams.is_array()) fail("instance.teams must be an array");
    for (const json& t : teams) {
      Team team;
      if (auto it = t.find("id"); it != t.end()) {
        if (!it->is_number_integer()) fail("team id must be an integer");
        team.id = static_cast<int>(it->get<long long>());
      } else {
        team.id = static_cast<int>(out.teams.size());
      }
      for (const json& s : need(t, "starts", "team")) {
        team.starts.push_back(resolve_vertex(s, out.graph, has_grid));
      }
      for (const json& s : need(t, "targets", "team")) {
        team.targets.push_back(resolve_vertex(s, out.graph, has_grid));
      }
      out.teams.push_back(team);
    }
  }
  return out;
}

json plan_to_json(const DiscretePlan& plan, const Graph& graph) {
  json robots = json::array();
  for (const RobotPath& r : plan.robots) {
    json seq = json::array();
    for (VertexId v : r.seq) seq.push_back(graph.name(v));
    robots.push_back({{"id", r.id}, {"seq", std::move(seq)}});
  }
  return json{{"robots", std::move(robots)},
              {"makespan", plan.makespan()},
              {"flowtime", plan.flowtime()}};
}

DiscretePlan plan_from_json(const json& doc, const Graph& graph) {
  DiscretePlan plan;
  const json& robots = need(doc, "robots", "plan");
  if (!robots.is_array()) fail("plan.robots must be an array");
  for (const json& r : robots) {
    RobotPath path;
    const json& id = need(r, "id", "plan robot");
    if (!id.is_number_integer()) fail("plan robot id must be an integer");
    path.id = static_cast<RobotId>(id.get<long long>());
    for (const json& v : need(r, "seq", "plan robot")) {
      const std::string name = id_string(v, "plan vertex");
      const auto vertex = graph.find(name);
      if (!vertex) fail("plan references unknown vertex '" + name + "'");
      path.seq.push_back(*vertex);
    }
    if (path.seq.empty()) fail("plan robot " + std::to_string(path.id) + " is empty");
    plan.robots.push_back(std::move(path));
  }
  return plan;
}

json schedule_to_json(const Schedule& schedule) {
  json robots = json::array();
  for (const auto& wps : schedule.robots) {
    json row = json::array();
    for (const Waypoint& wp : wps) {
      row.push_back({{"x", wp.pos.x}, {"y", wp.pos.y}, {"t", wp.time}});
    }
    robots.push_back(std::move(row));
  }
  return robots;
}

json metrics_to_json(const Metrics& metrics) {
  return json{{"runtime_s", metrics.runtime_s},
              {"min_pairwise_distance_m", metrics.min_pairwise_distance_m},
              {"avg_time_to_target_s", metrics.avg_time_to_target_s},
              {"stn_resolves", metrics.stn_resolves},
              {"replans", metrics.replans}};
}

std::string trajectory_to_jsonl(const std::vector<TrajectoryRow>& rows) {
  std::string out;
  for (const TrajectoryRow& r : rows) {
    const json line{{"t", r.t},           {"robot", r.robot},
                    {"x", r.x},           {"y", r.y},
                    {"waypoint_index", r.waypoint}, {"delayed", r.delayed}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string stn_dump(const Stn& stn) {
  std::ostringstream out;
  out.precision(17);
  for (const StnArc& arc : stn.arcs) {
    out << arc.from << ' ' << arc.to << ' ' << arc.lo << ' ';
    if (arc.hi == kUnbounded) {
      out << "inf";
    } else {
      out << arc.hi;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mrplan
