#include "mrplan/instance.hpp"

#include <algorithm>
#include <unordered_set>

namespace mrplan {

namespace {

bool vertex_ok(const Graph& g, VertexId v) { return v >= 0 && v < g.vertex_count(); }

void check_occupancy(const Graph& g, VertexId v, const std::string& role,
                     ViolationKind dup_kind, std::unordered_set<VertexId>& seen,
                     std::vector<Violation>& out) {
  if (!vertex_ok(g, v)) {
    out.push_back({ViolationKind::missing_vertex, role + " refers to a missing vertex"});
    return;
  }
  if (!seen.insert(v).second) {
    out.push_back({dup_kind, role + " reuses vertex '" + g.name(v) + "'"});
  }
}

}  // namespace

std::vector<Violation> validate_instance(const MapfInstance& instance) {
  std::vector<Violation> out;
  if (instance.robots.empty()) {
    out.push_back({ViolationKind::empty, "instance has no robots"});
  }
  std::unordered_set<VertexId> starts, targets;
  std::unordered_set<RobotId> ids;
  for (const auto& r : instance.robots) {
    std::string who = "robot " + std::to_string(r.id);
    if (!ids.insert(r.id).second) {
      out.push_back({ViolationKind::duplicate_robot_id, who + " appears twice"});
    }
    check_occupancy(instance.graph, r.start, who + " start",
                    ViolationKind::duplicate_start, starts, out);
    check_occupancy(instance.graph, r.target, who + " target",
                    ViolationKind::duplicate_target, targets, out);
  }
  return out;
}

std::vector<Violation> validate_instance(const TapfInstance& instance) {
  std::vector<Violation> out;
  if (instance.teams.empty()) {
    out.push_back({ViolationKind::empty, "instance has no teams"});
  }
  std::unordered_set<VertexId> starts, targets;
  std::unordered_set<int> team_ids;
  for (const auto& team : instance.teams) {
    std::string who = "team " + std::to_string(team.id);
    if (!team_ids.insert(team.id).second) {
      out.push_back({ViolationKind::duplicate_team_id, who + " appears twice"});
    }
    if (team.starts.empty()) {
      out.push_back({ViolationKind::empty, who + " has no robots"});
    }
    if (team.starts.size() != team.targets.size()) {
      out.push_back({ViolationKind::team_size_mismatch,
                     who + " has " + std::to_string(team.starts.size()) + " starts and " +
                         std::to_string(team.targets.size()) + " targets"});
    }
    for (VertexId s : team.starts) {
      check_occupancy(instance.graph, s, who + " start", ViolationKind::duplicate_start,
                      starts, out);
    }
    for (VertexId t : team.targets) {
      check_occupancy(instance.graph, t, who + " target", ViolationKind::duplicate_target,
                      targets, out);
    }
  }
  return out;
}

namespace {

[[noreturn]] void raise(const std::vector<Violation>& violations) {
  std::string msg = "invalid instance:";
  for (const auto& v : violations) msg += "\n  - " + v.detail;
  throw InputError(msg);
}

}  // namespace

void require_valid(MapfInstance& instance) {
  auto violations = validate_instance(instance);
  if (!violations.empty()) raise(violations);
  std::sort(instance.robots.begin(), instance.robots.end(),
            [](const RobotSpec& a, const RobotSpec& b) { return a.id < b.id; });
}

void require_valid(TapfInstance& instance) {
  auto violations = validate_instance(instance);
  if (!violations.empty()) raise(violations);
  std::sort(instance.teams.begin(), instance.teams.end(),
            [](const Team& a, const Team& b) { return a.id < b.id; });
}

}  // namespace mrplan
