#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mrplan/graph.hpp"

namespace mrplan {

struct RobotSpec {
  RobotId id = 0;
  VertexId start = kNoVertex;
  VertexId target = kNoVertex;
};

// Path finding with fixed targets.
struct MapfInstance {
  Graph graph;
  std::vector<RobotSpec> robots;  // sorted by id after validation
};

// A team of exchangeable robots: any bijection starts -> targets is
// acceptable. starts.size() == targets.size().
struct Team {
  int id = 0;
  std::vector<VertexId> starts;
  std::vector<VertexId> targets;
};

struct TapfInstance {
  Graph graph;
  std::vector<Team> teams;

  int robot_count() const {
    int n = 0;
    for (const auto& t : teams) n += static_cast<int>(t.starts.size());
    return n;
  }
};

enum class ViolationKind {
  duplicate_start,
  duplicate_target,
  missing_vertex,
  team_size_mismatch,
  duplicate_robot_id,
  duplicate_team_id,
  empty,
};

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Empty result means the instance is well-formed. Starts must be pairwise
// distinct and targets pairwise distinct (across teams for TAPF); every
// referenced vertex must exist.
std::vector<Violation> validate_instance(const MapfInstance& instance);
std::vector<Violation> validate_instance(const TapfInstance& instance);

// Throws InputError listing all violations; sorts MAPF robots by id.
void require_valid(MapfInstance& instance);
void require_valid(TapfInstance& instance);

using ProblemInstance = std::variant<MapfInstance, TapfInstance>;

}  // namespace mrplan
