#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "mrplan/cbm.hpp"
#include "mrplan/conflicts.hpp"
#include "oracles.hpp"

using namespace mrplan;

namespace {

// Nine-vertex corridor fixture used across the suite:
//
//   A  B        C  D
//      |        |
//   E  F  G  H  I      (B-F and H-C are the vertical links)
//
// Team 1 routes A -> H, team 2 routes {E, F} -> {D, I}.
struct Corridor {
  Graph g;
  VertexId A, B, C, D, E, F, G, H, I;
  Corridor() {
    A = g.add_vertex("A", {-1, 1});
    B = g.add_vertex("B", {0, 1});
    C = g.add_vertex("C", {2, 1});
    D = g.add_vertex("D", {3, 1});
    E = g.add_vertex("E", {-1, 0});
    F = g.add_vertex("F", {0, 0});
    G = g.add_vertex("G", {1, 0});
    H = g.add_vertex("H", {2, 0});
    I = g.add_vertex("I", {3, 0});
    g.add_edge(A, B, 1.0);
    g.add_edge(B, F, 1.0);
    g.add_edge(E, F, 1.0);
    g.add_edge(F, G, 1.0);
    g.add_edge(G, H, 1.0);
    g.add_edge(H, I, 1.0);
    g.add_edge(H, C, 1.0);
    g.add_edge(C, D, 1.0);
  }
  TapfInstance instance() const {
    TapfInstance inst;
    inst.graph = g;
    inst.teams = {{1, {A}, {H}}, {2, {E, F}, {D, I}}};
    return inst;
  }
};

Graph line_graph(int n) {
  Graph g;
  for (int i = 0; i < n; ++i) {
    g.add_vertex(std::string(1, static_cast<char>('A' + i)),
                 {static_cast<double>(i), 0.0});
  }
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, 1.0);
  return g;
}

}  // namespace

TEST_CASE("bottleneck assignment minimizes the worst distance") {
  const Corridor c;
  TapfInstance inst = c.instance();
  require_valid(inst);
  const TeamAssignment a = bottleneck_assignment(inst);
  REQUIRE(a.size() == 2);
  CHECK(a[0] == std::vector<int>{0});     // A -> H
  CHECK(a[1] == std::vector<int>{1, 0});  // E -> I (4 hops), F -> D (4 hops)
}

TEST_CASE("bottleneck assignment rejects unreachable teams") {
  TapfInstance inst;
  inst.graph.add_vertex("A", {0, 0});
  inst.graph.add_vertex("B", {5, 0});  // disconnected
  inst.teams = {{0, {0}, {1}}};
  CHECK_THROWS_AS(bottleneck_assignment(inst), InputError);
}

TEST_CASE("tapf_to_mapf freezes an assignment") {
  const Corridor c;
  TapfInstance inst = c.instance();
  require_valid(inst);
  const TeamAssignment a = bottleneck_assignment(inst);
  const MapfInstance mapf = tapf_to_mapf(inst, a);
  REQUIRE(mapf.robots.size() == 3);
  CHECK(mapf.robots[0].id == 0);
  CHECK(mapf.robots[0].start == c.A);
  CHECK(mapf.robots[0].target == c.H);
  CHECK(mapf.robots[1].start == c.E);
  CHECK(mapf.robots[1].target == c.I);
  CHECK(mapf.robots[2].start == c.F);
  CHECK(mapf.robots[2].target == c.D);

  TeamAssignment bad = a;
  bad[1] = {0, 0};  // not a bijection
  CHECK_THROWS_AS(tapf_to_mapf(inst, bad), InputError);
}

TEST_CASE("team flow: corridor team routes exactly at its lower bound") {
  const Corridor c;
  const Team team{2, {c.E, c.F}, {c.D, c.I}};

  const TeamFlowResult t3 = plan_team_flow(c.g, team, 3, {});
  CHECK_FALSE(t3.feasible);

  const TeamFlowResult t4 = plan_team_flow(c.g, team, 4, {});
  REQUIRE(t4.feasible);
  REQUIRE(t4.paths.size() == 2);
  CHECK(t4.paths[0] == std::vector<VertexId>{c.E, c.F, c.G, c.H, c.I});
  CHECK(t4.paths[1] == std::vector<VertexId>{c.F, c.G, c.H, c.C, c.D});
}

TEST_CASE("team flow: prohibitions are respected") {
  const Corridor c;
  const Team team{2, {c.E, c.F}, {c.D, c.I}};
  const TeamConstraintSet ban = {
      {TeamProhibition::Kind::vertex, c.G, kNoVertex, 2}};

  // at T=4 the E-robot has no slack and must cross G at t=2
  CHECK_FALSE(plan_team_flow(c.g, team, 4, ban).feasible);

  const TeamFlowResult t5 = plan_team_flow(c.g, team, 5, ban);
  REQUIRE(t5.feasible);
  for (const auto& path : t5.paths) {
    REQUIRE(path.size() == 6);
    CHECK(path[2] != c.G);
  }
}

TEST_CASE("team flow: edge prohibition blocks one direction only") {
  const Graph g = line_graph(3);
  const Team team{0, {0}, {2}};
  const TeamConstraintSet ban = {{TeamProhibition::Kind::edge, 1, 0, 1}};
  const TeamFlowResult blocked = plan_team_flow(g, team, 2, ban);
  CHECK_FALSE(blocked.feasible);  // A->B arrival at t=1 is the only route
  const TeamFlowResult wait = plan_team_flow(g, team, 3, ban);
  REQUIRE(wait.feasible);
  CHECK(wait.paths[0] == std::vector<VertexId>{0, 0, 1, 2});
}

TEST_CASE("team flow: occupancy capacity one per vertex per step") {
  // two robots must funnel through the middle of a line, one behind the other
  const Graph g = line_graph(4);  // A-B-C-D
  const Team team{0, {0, 1}, {2, 3}};
  const TeamFlowResult r = plan_team_flow(g, team, 2, {});
  REQUIRE(r.feasible);
  // B-robot reaches D only via C; A-robot follows one step behind into C
  CHECK(r.paths[0] == std::vector<VertexId>{0, 1, 2});
  CHECK(r.paths[1] == std::vector<VertexId>{1, 2, 3});
}

TEST_CASE("team flow is deterministic") {
  const Corridor c;
  const Team team{2, {c.E, c.F}, {c.D, c.I}};
  const TeamFlowResult a = plan_team_flow(c.g, team, 5, {});
  const TeamFlowResult b = plan_team_flow(c.g, team, 5, {});
  REQUIRE(a.feasible);
  REQUIRE(b.feasible);
  CHECK(a.paths == b.paths);
}

TEST_CASE("CBM: corridor instance solves at makespan 4 with the known plan") {
  const Corridor c;
  TapfInstance inst = c.instance();
  require_valid(inst);
  const PlanResult r = plan_cbm(inst);
  REQUIRE(r.status == PlanStatus::ok);
  CHECK(r.objective_value == doctest::Approx(4.0));
  CHECK(r.lower_bound == doctest::Approx(4.0));
  REQUIRE(r.plan.robots.size() == 3);
  CHECK(r.plan.robots[0].seq ==
        std::vector<VertexId>{c.A, c.B, c.F, c.G, c.H});
  CHECK(r.plan.robots[1].seq ==
        std::vector<VertexId>{c.E, c.F, c.G, c.H, c.I});
  CHECK(r.plan.robots[2].seq ==
        std::vector<VertexId>{c.F, c.G, c.H, c.C, c.D});
  CHECK(detect_conflicts(r.plan, inst.graph).empty());
  CHECK_FALSE(plan_structural_error(r.plan, inst).has_value());
  CHECK(oracle::tapf_makespan(inst) == 4);
}

TEST_CASE("CBM: anonymity beats every fixed assignment when targets cross") {
  TapfInstance inst;
  inst.graph = line_graph(3);
  inst.teams = {{0, {0, 2}, {2, 0}}};  // {A, C} -> {C, A}
  require_valid(inst);
  const PlanResult r = plan_cbm(inst);
  REQUIRE(r.status == PlanStatus::ok);
  CHECK(r.objective_value == doctest::Approx(0.0));  // claim your own vertex

  // the crossed fixed assignment is infeasible outright
  MapfInstance crossed;
  crossed.graph = inst.graph;
  crossed.robots = {{0, 0, 2}, {1, 2, 0}};
  CHECK(plan_cbs(crossed, Objective::makespan).status ==
        PlanStatus::infeasible);
}

TEST_CASE("CBM: inter-team conflicts are resolved optimally") {
  TapfInstance inst;
  Graph& g = inst.graph;
  const VertexId x = g.add_vertex("X", {0, 0});
  const VertexId n = g.add_vertex("N", {0, 1});
  const VertexId s = g.add_vertex("S", {0, -1});
  const VertexId w = g.add_vertex("W", {-1, 0});
  const VertexId e = g.add_vertex("E", {1, 0});
  g.add_edge(x, n, 1.0);
  g.add_edge(x, s, 1.0);
  g.add_edge(x, w, 1.0);
  g.add_edge(x, e, 1.0);
  inst.teams = {{0, {w}, {e}}, {1, {n}, {s}}};
  require_valid(inst);
  const PlanResult r = plan_cbm(inst);
  REQUIRE(r.status == PlanStatus::ok);
  CHECK(r.objective_value == doctest::Approx(3.0));
  CHECK(detect_conflicts(r.plan, inst.graph).empty());
  CHECK(oracle::tapf_makespan(inst) == 3);
}

TEST_CASE("CBM: opposed singleton teams on a line are infeasible") {
  TapfInstance inst;
  inst.graph = line_graph(3);
  inst.teams = {{0, {0}, {2}}, {1, {2}, {0}}};
  require_valid(inst);
  const PlanResult r = plan_cbm(inst);
  CHECK(r.status == PlanStatus::infeasible);
  CHECK(oracle::tapf_makespan(inst) == -1);
}

TEST_CASE("CBM matches the assignment-enumeration oracle on random instances") {
  for (int seed = 301; seed <= 330; ++seed) {
    oracle::Rng rng(static_cast<std::uint64_t>(seed));
    const int n = 4 + rng.below(9);
    const int k = 1 + rng.below(3);
    const MapfInstance mapf = oracle::random_mapf(rng, n, k);
    TapfInstance inst = oracle::to_tapf(mapf, rng);
    require_valid(inst);
    const int expect = oracle::tapf_makespan(inst);
    const PlanResult r = plan_cbm(inst);
    if (expect < 0) {
      CHECK(r.status == PlanStatus::infeasible);
    } else {
      REQUIRE(r.status == PlanStatus::ok);
      CHECK(r.objective_value == doctest::Approx(expect));
      CHECK(detect_conflicts(r.plan, inst.graph).empty());
      CHECK_FALSE(plan_structural_error(r.plan, inst).has_value());
    }
  }
}

TEST_CASE("CBM honors a zero timeout") {
  const Corridor c;
  TapfInstance inst = c.instance();
  require_valid(inst);
  CHECK(plan_cbm(inst, 0.0).status == PlanStatus::timeout);
}
