#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "mrplan/schedule.hpp"
#include "mrplan/simulator.hpp"

using namespace mrplan;

namespace {

// Same corridor handover fixture as the scheduling tests.
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
  DiscretePlan plan() const {
    DiscretePlan p;
    p.robots = {{0, {A, B, F, G, H}},
                {1, {E, F, G, H, I}},
                {2, {F, G, H, C, D}}};
    return p;
  }
};

struct Fixture {
  Corridor c;
  DiscretePlan plan;
  PostConfig post_cfg;
  PostResult post;
  Fixture(std::optional<double> cap = std::nullopt) : plan(c.plan()) {
    post_cfg.delta = 0.2;
    post_cfg.epsilon = 0.1;
    post_cfg.makespan_cap = cap;
    post = post_process(plan, c.g, post_cfg);
  }
  RunResult run(const SimConfig& cfg) const {
    return simulate(c.g, plan, post_cfg, post, cfg);
  }
};

bool logs_equal(const std::vector<TrajectoryRow>& a,
                const std::vector<TrajectoryRow>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].t != b[i].t || a[i].robot != b[i].robot || a[i].x != b[i].x ||
        a[i].y != b[i].y || a[i].waypoint != b[i].waypoint ||
        a[i].delayed != b[i].delayed) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("controller speed: proportional, clamped, parked") {
  CHECK(controller_speed(1.0, 2.0, 1.0) == doctest::Approx(0.5));
  CHECK(controller_speed(2.0, 1.0, 1.0) == doctest::Approx(1.0));  // clamp
  CHECK(controller_speed(0.0, 3.0, 1.0) == doctest::Approx(0.0));
  CHECK(controller_speed(1.0, 0.0, 1.0) == doctest::Approx(1.0));  // overdue
  CHECK(controller_speed(1.0, -5.0, 2.0) == doctest::Approx(2.0));
  // inside the last tick the divisor is floored at dt
  CHECK(controller_speed(0.01, 0.001, 1.0, 0.05) ==
        doctest::Approx(0.01 / 0.05));
  CHECK_THROWS_AS(controller_speed(-0.1, 1.0, 1.0), InputError);
}

TEST_CASE("nominal run tracks the schedule") {
  const Fixture fx;
  SimConfig cfg;
  const RunResult r = fx.run(cfg);
  REQUIRE(r.ok);
  CHECK_FALSE(r.timed_out);
  CHECK(r.failure.empty());
  CHECK(r.metrics.stn_resolves == 0);
  CHECK(r.metrics.replans == 0);
  // every robot's scheduled arrival is 4.0; quantization may add up to dt
  CHECK(r.metrics.avg_time_to_target_s >= 4.0 - 1e-9);
  CHECK(r.metrics.avg_time_to_target_s <= 4.0 + cfg.dt + 1e-9);
  CHECK(r.metrics.min_pairwise_distance_m >= 0.2 - 1e-6);

  // trajectory: everyone starts at t=0 and ends on its final waypoint
  REQUIRE_FALSE(r.log.empty());
  CHECK(r.log.front().t == 0.0);
  std::map<int, TrajectoryRow> last;
  for (const auto& row : r.log) last[row.robot] = row;
  REQUIRE(last.size() == 3);
  CHECK(last[0].waypoint == 7);   // 8 waypoints: 5 arrivals + 3 markers
  CHECK(last[1].waypoint == 10);  // 11 waypoints
  CHECK(last[2].waypoint == 7);
  CHECK(last[0].x == doctest::Approx(fx.c.g.pos(fx.c.H).x));
  CHECK(last[0].y == doctest::Approx(fx.c.g.pos(fx.c.H).y));
}

TEST_CASE("identical seeds reproduce identical runs") {
  const Fixture fx;
  SimConfig cfg;
  cfg.seed = 7;
  cfg.delays.p = 0.2;
  cfg.delays.f = 0.5;
  const RunResult a = fx.run(cfg);
  const RunResult b = fx.run(cfg);
  CHECK(a.ok == b.ok);
  CHECK(logs_equal(a.log, b.log));
  CHECK(a.metrics.min_pairwise_distance_m == b.metrics.min_pairwise_distance_m);
  CHECK(a.metrics.avg_time_to_target_s == b.metrics.avg_time_to_target_s);
  CHECK(a.metrics.stn_resolves == b.metrics.stn_resolves);
  CHECK(a.metrics.replans == b.metrics.replans);
}

TEST_CASE("different seeds draw different delays") {
  const Fixture fx;
  SimConfig cfg;
  cfg.delays.p = 0.2;
  cfg.delays.f = 0.5;
  cfg.seed = 1;
  const RunResult a = fx.run(cfg);
  cfg.seed = 2;
  const RunResult b = fx.run(cfg);
  CHECK_FALSE(logs_equal(a.log, b.log));
}

TEST_CASE("common random numbers: delays grow monotonically with p") {
  const Fixture fx;
  SimConfig lo;
  lo.seed = 11;
  lo.delays.p = 0.1;
  lo.delays.f = 0.5;
  SimConfig hi = lo;
  hi.delays.p = 0.3;
  const RunResult a = fx.run(lo);
  const RunResult b = fx.run(hi);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  std::set<std::pair<long, int>> delayed_hi;
  for (const auto& row : b.log) {
    if (row.delayed) delayed_hi.insert({std::lround(row.t * 1000), row.robot});
  }
  for (const auto& row : a.log) {
    if (row.delayed) {
      CHECK(delayed_hi.count({std::lround(row.t * 1000), row.robot}) == 1);
    }
  }
  CHECK(b.metrics.avg_time_to_target_s >=
        a.metrics.avg_time_to_target_s - 1e-9);
}

TEST_CASE("p=1 with f=0 freezes everyone until the tick budget runs out") {
  const Fixture fx;
  SimConfig cfg;
  cfg.delays.p = 1.0;
  cfg.delays.f = 0.0;
  cfg.max_ticks = 100;
  const RunResult r = fx.run(cfg);
  CHECK_FALSE(r.ok);
  CHECK(r.timed_out);
  CHECK_FALSE(r.failure.empty());
  CHECK(r.metrics.avg_time_to_target_s == doctest::Approx(5.0));  // 100 ticks
  // nobody ever left its start
  std::map<int, std::pair<double, double>> start;
  for (const auto& row : r.log) {
    const auto it = start.find(row.robot);
    if (it == start.end()) {
      start[row.robot] = {row.x, row.y};
    } else {
      CHECK(row.x == it->second.first);
      CHECK(row.y == it->second.second);
    }
  }
  CHECK(r.metrics.min_pairwise_distance_m == doctest::Approx(1.0));
}

TEST_CASE("full stop window pins a robot in place") {
  const Fixture fx;
  SimConfig cfg;
  cfg.delays.stops = {{0, 0.0, 2.0}};
  const RunResult r = fx.run(cfg);
  REQUIRE(r.ok);
  const Vec2 a = fx.c.g.pos(fx.c.A);
  for (const auto& row : r.log) {
    if (row.robot == 0 && row.t <= 2.0) {
      CHECK(row.x == doctest::Approx(a.x));
      CHECK(row.y == doctest::Approx(a.y));
      if (row.t > 0.0) CHECK(row.delayed);
    }
  }
  // the stopped robot catches up at full speed: 2.0 + 4.0 of travel
  CHECK(r.metrics.avg_time_to_target_s >= (4.0 + 4.0 + 6.0) / 3.0 - 1e-9);
  CHECK(r.metrics.avg_time_to_target_s <= (4.0 + 4.0 + 6.0) / 3.0 + 0.1);
  // safety gates keep separation despite the disturbance
  CHECK(r.metrics.min_pairwise_distance_m >= 0.15 - 1e-9);
}

TEST_CASE("degradation is monotone in the delay probability") {
  const Fixture fx;
  double prev = 0.0;
  for (const double p : {0.0, 0.2, 0.4}) {
    SimConfig cfg;
    cfg.seed = 3;
    cfg.delays.p = p;
    cfg.delays.f = 0.5;
    const RunResult r = fx.run(cfg);
    REQUIRE(r.ok);
    CHECK(r.metrics.avg_time_to_target_s >= prev - 1e-9);
    prev = r.metrics.avg_time_to_target_s;
    CHECK(r.metrics.min_pairwise_distance_m >= 0.15 - 1e-9);
  }
}

TEST_CASE("without a deadline the monitor stays quiet under delays") {
  const Fixture fx;
  SimConfig cfg;
  cfg.seed = 9;
  cfg.delays.p = 0.3;
  cfg.delays.f = 0.25;
  const RunResult r = fx.run(cfg);
  REQUIRE(r.ok);
  CHECK(r.metrics.stn_resolves == 0);
  CHECK(r.metrics.replans == 0);
}

TEST_CASE("deadline pressure escalates: resolve, re-plan, structured failure") {
  const Fixture fx(4.2);  // 0.2 s of slack over the 4.0 s schedule
  SimConfig cfg;
  cfg.delays.stops = {{1, 0.0, 1.0}};  // one second of outage eats the slack
  const RunResult r = fx.run(cfg);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.timed_out);
  CHECK(r.metrics.stn_resolves == 1);
  CHECK(r.metrics.replans == 1);
  CHECK(r.failure.find("deadline") != std::string::npos);
}

TEST_CASE("a loose deadline absorbs a short outage without re-planning") {
  const Fixture fx(8.0);
  SimConfig cfg;
  cfg.delays.stops = {{1, 0.0, 1.0}};
  const RunResult r = fx.run(cfg);
  REQUIRE(r.ok);
  CHECK(r.metrics.replans == 0);
  // the monitor may or may not have re-anchored, but the run must finish
  CHECK(r.metrics.avg_time_to_target_s <= 8.0);
  CHECK(r.metrics.min_pairwise_distance_m >= 0.15 - 1e-9);
}

TEST_CASE("simulation config is validated") {
  const Fixture fx;
  SimConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(fx.run(bad), InputError);
  SimConfig neg;
  neg.delays.p = 1.5;
  CHECK_THROWS_AS(fx.run(neg), InputError);
  SimConfig stop;
  stop.delays.stops = {{0, 3.0, 1.0}};  // ends before it begins
  CHECK_THROWS_AS(fx.run(stop), InputError);
  SimConfig w;
  w.replan.w = 0.5;
  CHECK_THROWS_AS(fx.run(w), InputError);
}
