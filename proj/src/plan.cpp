#include "mrplan/plan.hpp"

#include <algorithm>
#include <unordered_map>

namespace mrplan {

int DiscretePlan::makespan() const {
  if (robots.empty()) return 0;
  return static_cast<int>(robots.front().seq.size()) - 1;
}

int DiscretePlan::settle_time(int robot_index) const {
  const auto& seq = robots[static_cast<size_t>(robot_index)].seq;
  for (int t = static_cast<int>(seq.size()) - 1; t >= 1; --t) {
    if (seq[static_cast<size_t>(t)] != seq[static_cast<size_t>(t) - 1]) return t;
  }
  return 0;
}

int DiscretePlan::flowtime() const {
  int total = 0;
  for (size_t i = 0; i < robots.size(); ++i) total += settle_time(static_cast<int>(i));
  return total;
}

void DiscretePlan::pad_to(int T) {
  for (auto& r : robots) {
    if (r.seq.empty()) continue;
    r.seq.resize(static_cast<size_t>(T) + 1, r.seq.back());
  }
}

namespace {

std::optional<std::string> check_moves(const DiscretePlan& plan, const Graph& g) {
  if (plan.robots.empty()) return "plan has no robots";
  size_t len = plan.robots.front().seq.size();
  if (len == 0) return "robot " + std::to_string(plan.robots.front().id) + " has an empty path";
  for (const auto& r : plan.robots) {
    if (r.seq.size() != len) {
      return "robot " + std::to_string(r.id) + " path length differs from the others";
    }
    for (size_t t = 0; t < r.seq.size(); ++t) {
      VertexId v = r.seq[t];
      if (v < 0 || v >= g.vertex_count()) {
        return "robot " + std::to_string(r.id) + " visits a missing vertex at timestep " +
               std::to_string(t);
      }
      if (t > 0 && r.seq[t - 1] != v && !g.has_edge(r.seq[t - 1], v)) {
        return "robot " + std::to_string(r.id) + " jumps " + g.name(r.seq[t - 1]) + "->" +
               g.name(v) + " at timestep " + std::to_string(t) + " (no such edge)";
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> plan_structural_error(const DiscretePlan& plan,
                                                 const MapfInstance& instance) {
  if (auto err = check_moves(plan, instance.graph)) return err;
  if (plan.robots.size() != instance.robots.size()) {
    return "plan has " + std::to_string(plan.robots.size()) + " robots, instance has " +
           std::to_string(instance.robots.size());
  }
  for (size_t i = 0; i < plan.robots.size(); ++i) {
    const auto& path = plan.robots[i];
    const auto& spec = instance.robots[i];
    if (path.id != spec.id) {
      return "plan robot order does not match the instance at index " + std::to_string(i);
    }
    if (path.seq.front() != spec.start) {
      return "robot " + std::to_string(spec.id) + " does not begin at its start";
    }
    if (path.seq.back() != spec.target) {
      return "robot " + std::to_string(spec.id) + " does not end at its target";
    }
  }
  return std::nullopt;
}

std::optional<std::string> plan_structural_error(const DiscretePlan& plan,
                                                 const TapfInstance& instance) {
  if (auto err = check_moves(plan, instance.graph)) return err;
  if (static_cast<int>(plan.robots.size()) != instance.robot_count()) {
    return "plan robot count does not match the instance";
  }
  size_t i = 0;
  for (const auto& team : instance.teams) {
    std::unordered_map<VertexId, int> wanted;
    for (VertexId t : team.targets) ++wanted[t];
    for (VertexId s : team.starts) {
      const auto& path = plan.robots[i++];
      if (path.seq.front() != s) {
        return "team " + std::to_string(team.id) + " robot does not begin at start '" +
               instance.graph.name(s) + "'";
      }
      auto it = wanted.find(path.seq.back());
      if (it == wanted.end() || it->second == 0) {
        return "team " + std::to_string(team.id) +
               " robot ends off-target at '" + instance.graph.name(path.seq.back()) + "'";
      }
      --it->second;
    }
  }
  return std::nullopt;
}

}  // namespace mrplan
