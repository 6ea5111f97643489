// End-to-end tests that drive the installed CLI binary exactly the way a user
// would: shell out, then check exit codes, summary lines, and artifacts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

using nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out;
};

// Runs the binary with the given argument string; stderr is discarded so
// expected-failure cases stay quiet. Returns the exit code and stdout.
CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(MRPLAN_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) res.out.append(buf, n);
  const int raw = ::pclose(pipe);
  res.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return res;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string tmpl = "/tmp/mrplan_cli_XXXXXX";
    char* made = ::mkdtemp(tmpl.data());
    REQUIRE(made != nullptr);
    path = made;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string scenario(const std::string& name) {
  return std::string(MRPLAN_SCENARIO_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

// Extracts the value of "key=value" from a summary line (value ends at
// whitespace). Fails the test if the key is absent.
std::string field(const std::string& out, const std::string& key) {
  const std::string needle = key + "=";
  const size_t at = out.find(needle);
  REQUIRE(at != std::string::npos);
  size_t from = at + needle.size();
  size_t to = from;
  while (to < out.size() && out[to] != ' ' && out[to] != '\n') ++to;
  return out.substr(from, to - from);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  size_t from = 0;
  while (from < text.size()) {
    size_t to = text.find('\n', from);
    if (to == std::string::npos) to = text.size();
    lines.push_back(text.substr(from, to - from));
    from = to + 1;
  }
  return lines;
}

std::vector<std::string> csv_fields(const std::string& row) {
  std::vector<std::string> fields;
  size_t from = 0;
  while (true) {
    size_t to = row.find(',', from);
    if (to == std::string::npos) {
      fields.push_back(row.substr(from));
      break;
    }
    fields.push_back(row.substr(from, to - from));
    from = to + 1;
  }
  return fields;
}

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t count = 0;
  for (size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("plan subcommand writes the team plan and is deterministic") {
  TempDir tmp;
  const std::string out1 = tmp.file("plan1.json");
  const CliResult r1 =
      run_cli("plan --scenario " + scenario("fig3.json") + " --out " + out1);
  CHECK(r1.code == 0);
  CHECK(r1.out.find("plan status=ok makespan=4 flowtime=12") != std::string::npos);
  CHECK(field(r1.out, "lower_bound") == "4.000000");

  const json plan = json::parse(slurp(out1));
  CHECK(plan.at("makespan") == 4);
  CHECK(plan.at("flowtime") == 12);
  REQUIRE(plan.at("robots").size() == 3);
  CHECK(plan["robots"][0]["id"] == 0);
  CHECK(plan["robots"][0]["seq"] == json::array({"A", "B", "F", "G", "H"}));
  CHECK(plan["robots"][1]["seq"] == json::array({"E", "F", "G", "H", "I"}));
  CHECK(plan["robots"][2]["seq"] == json::array({"F", "G", "H", "C", "D"}));

  const std::string out2 = tmp.file("plan2.json");
  const CliResult r2 =
      run_cli("plan --scenario " + scenario("fig3.json") + " --out " + out2);
  CHECK(r2.code == 0);
  CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("post subcommand writes the schedule and the temporal-network dump") {
  TempDir tmp;
  const std::string sched_path = tmp.file("sched.json");
  const std::string stn_path = tmp.file("stn.txt");
  const CliResult r = run_cli("post --scenario " + scenario("fig3.json") + " --out " +
                              sched_path + " --stn-dump " + stn_path);
  CHECK(r.code == 0);
  CHECK(field(r.out, "events") == "28");
  CHECK(field(r.out, "makespan_s") == "4.000000");
  CHECK(field(r.out, "min_slack_s") == "inf");
  CHECK(field(r.out, "delta") == "0.200000");

  const json sched = json::parse(slurp(sched_path));
  REQUIRE(sched.is_array());
  REQUIRE(sched.size() == 3);
  CHECK(sched[0].size() == 8);
  CHECK(sched[1].size() == 11);
  CHECK(sched[2].size() == 8);
  for (const json& row : sched) {
    double prev = -1.0;
    for (const json& wp : row) {
      CHECK(wp.size() == 3);
      CHECK(wp.contains("x"));
      CHECK(wp.contains("y"));
      const double t = wp.at("t").get<double>();
      CHECK(t >= prev);
      prev = t;
    }
    CHECK(row.front().at("t").get<double>() == doctest::Approx(0.0));
    CHECK(row.back().at("t").get<double>() == doctest::Approx(4.0));
  }
  // Robot 0 parks on H = (2, 0); robot 1 on I = (3, 0).
  CHECK(sched[0].back().at("x").get<double>() == doctest::Approx(2.0));
  CHECK(sched[0].back().at("y").get<double>() == doctest::Approx(0.0));
  CHECK(sched[1].back().at("x").get<double>() == doctest::Approx(3.0));

  // One dump line per arc, each "from to lo hi" with hi possibly "inf".
  const int arcs = std::stoi(field(r.out, "arcs"));
  const std::vector<std::string> dump = lines_of(slurp(stn_path));
  CHECK(static_cast<int>(dump.size()) == arcs);
  for (const std::string& line : dump) {
    std::istringstream ss(line);
    int from = -1, to = -1;
    std::string lo, hi;
    ss >> from >> to >> lo >> hi;
    CHECK(from >= 0);
    CHECK(to >= 1);
    CHECK(from < 28);
    CHECK(to < 28);
    CHECK(!lo.empty());
    if (hi != "inf") CHECK(std::stod(hi) >= std::stod(lo));
  }
}

TEST_CASE("post subcommand reuses a plan file byte-for-byte") {
  TempDir tmp;
  const std::string plan_path = tmp.file("plan.json");
  REQUIRE(run_cli("plan --scenario " + scenario("fig3.json") + " --out " + plan_path)
              .code == 0);
  const std::string direct = tmp.file("direct.json");
  const std::string via_plan = tmp.file("via_plan.json");
  REQUIRE(run_cli("post --scenario " + scenario("fig3.json") + " --out " + direct)
              .code == 0);
  REQUIRE(run_cli("post --scenario " + scenario("fig3.json") + " --plan " + plan_path +
                  " --out " + via_plan)
              .code == 0);
  CHECK(slurp(direct) == slurp(via_plan));
}

TEST_CASE("simulate subcommand writes metrics, trajectory log, and svg") {
  TempDir tmp;
  const std::string metrics_path = tmp.file("metrics.json");
  const std::string log_path = tmp.file("traj.jsonl");
  const std::string svg_path = tmp.file("run.svg");
  const CliResult r = run_cli("simulate --scenario " + scenario("fig3.json") +
                              " --out " + metrics_path + " --log " + log_path +
                              " --svg " + svg_path);
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate ok=1") != std::string::npos);

  const json metrics = json::parse(slurp(metrics_path));
  REQUIRE(metrics.is_object());
  CHECK(metrics.size() == 5);
  CHECK(metrics.contains("runtime_s"));
  CHECK(metrics.contains("min_pairwise_distance_m"));
  CHECK(metrics.contains("avg_time_to_target_s"));
  CHECK(metrics.contains("stn_resolves"));
  CHECK(metrics.contains("replans"));
  CHECK(metrics.at("replans") == 0);
  CHECK(metrics.at("stn_resolves") == 0);
  const double min_dist = metrics.at("min_pairwise_distance_m").get<double>();
  CHECK(min_dist >= 0.2 - 1e-6);
  // The closest approach is the diagonal merge into the shared corridor.
  CHECK(min_dist == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
  const double avg = metrics.at("avg_time_to_target_s").get<double>();
  CHECK(avg >= 4.0 - 1e-9);
  CHECK(avg <= 4.0 + 0.05 + 1e-9);

  const std::vector<std::string> rows = lines_of(slurp(log_path));
  REQUIRE(!rows.empty());
  const json first = json::parse(rows.front());
  CHECK(first.size() == 6);
  CHECK(first.contains("t"));
  CHECK(first.contains("robot"));
  CHECK(first.contains("x"));
  CHECK(first.contains("y"));
  CHECK(first.contains("waypoint_index"));
  CHECK(first.contains("delayed"));
  CHECK(first.at("t") == doctest::Approx(0.0));
  for (const std::string& row : rows) {
    const json parsed = json::parse(row);
    CHECK(parsed.is_object());
  }

  const std::string svg = slurp(svg_path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(count_occurrences(svg, "<path ") == 3);
  CHECK(svg.find("<title>robot 0</title>") != std::string::npos);
  CHECK(svg.find("<title>robot 2</title>") != std::string::npos);
}

TEST_CASE("simulate artifacts are identical across reruns with one seed") {
  TempDir tmp;
  auto run_once = [&](const std::string& tag) {
    const std::string args = "simulate --scenario " + scenario("fig3.json") +
                             " --seed 42 --out " + tmp.file(tag + ".json") +
                             " --log " + tmp.file(tag + ".jsonl") + " --svg " +
                             tmp.file(tag + ".svg");
    REQUIRE(run_cli(args).code == 0);
  };
  run_once("a");
  run_once("b");

  json ma = json::parse(slurp(tmp.file("a.json")));
  json mb = json::parse(slurp(tmp.file("b.json")));
  ma["runtime_s"] = 0.0;  // wall-clock runtime is the one legitimately varying field
  mb["runtime_s"] = 0.0;
  CHECK(ma == mb);
  CHECK(slurp(tmp.file("a.jsonl")) == slurp(tmp.file("b.jsonl")));
  CHECK(slurp(tmp.file("a.svg")) == slurp(tmp.file("b.svg")));
}

TEST_CASE("exit codes distinguish input, infeasibility, timeout, and failure") {
  TempDir tmp;

  // Opposed robots on a line: no discrete plan exists.
  const CliResult infeasible =
      run_cli("plan --scenario " + scenario("infeasible_swap.json"));
  CHECK(infeasible.code == 3);
  CHECK(infeasible.out.find("plan status=infeasible") != std::string::npos);

  // A zero planning budget times out before the first expansion.
  const CliResult timeout =
      run_cli("plan --scenario " + scenario("fig3.json") + " --timeout 0");
  CHECK(timeout.code == 4);
  CHECK(timeout.out.find("plan status=timeout") != std::string::npos);

  // Every robot is delayed every tick, so the tick budget runs out.
  const CliResult stalled =
      run_cli("simulate --scenario " + scenario("fig3_stall.json"));
  CHECK(stalled.code == 4);
  CHECK(stalled.out.find("simulate ok=0") != std::string::npos);
  CHECK(stalled.out.find("failure=\"tick budget exhausted") != std::string::npos);

  const CliResult missing =
      run_cli("plan --scenario " + tmp.file("does_not_exist.json"));
  CHECK(missing.code == 2);

  const std::string bad = tmp.file("bad.json");
  spit(bad, "{ this is not json");
  CHECK(run_cli("plan --scenario " + bad).code == 2);

  // Structurally valid JSON whose contents cannot drive the chosen planner.
  const std::string mismatch = tmp.file("mismatch.json");
  spit(mismatch, R"({
    "instance": {
      "graph": {
        "vertices": [{"id": "A", "x": 0, "y": 0}, {"id": "B", "x": 1, "y": 0}],
        "edges": [{"u": "A", "v": "B"}]
      },
      "robots": [{"start": "A", "target": "B"}]
    },
    "planner": {"kind": "cbm"}
  })");
  CHECK(run_cli("plan --scenario " + mismatch).code == 2);
}

TEST_CASE("bench subcommand writes rows in suite order plus per-scenario stats") {
  TempDir tmp;
  const std::string fig3 = scenario("fig3.json");
  const std::string swap = scenario("infeasible_swap.json");
  const std::string suite = tmp.file("suite.json");
  spit(suite, std::string("{\"scenarios\": [{\"path\": \"") + fig3 +
                  "\", \"seeds\": [1, 2]}, {\"path\": \"" + swap + "\"}]}");

  const std::string csv_path = tmp.file("bench.csv");
  const CliResult r = run_cli("bench --suite " + suite + " --out " + csv_path);
  CHECK(r.code == 0);

  const std::vector<std::string> rows = lines_of(slurp(csv_path));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] ==
        "scenario,seed,status,planning_time_s,schedule_makespan_s,runtime_s,"
        "min_pairwise_distance_m,avg_time_to_target_s,stn_resolves,replans");

  const std::vector<std::string> run1 = csv_fields(rows[1]);
  REQUIRE(run1.size() == 10);
  CHECK(run1[0] == fig3);
  CHECK(run1[1] == "1");
  CHECK(run1[2] == "ok");
  CHECK(run1[4] == "4.000000");

  const std::vector<std::string> run2 = csv_fields(rows[2]);
  CHECK(run2[1] == "2");
  CHECK(run2[2] == "ok");

  // The planner found no solution, so the execution columns stay empty.
  const std::vector<std::string> failed = csv_fields(rows[3]);
  REQUIRE(failed.size() == 10);
  CHECK(failed[0] == swap);
  CHECK(failed[1] == "0");
  CHECK(failed[2] == "infeasible");
  for (size_t c = 4; c < 10; ++c) CHECK(failed[c].empty());

  // Aggregates only for the scenario that produced numeric rows.
  CHECK(csv_fields(rows[4])[1] == "mean");
  CHECK(csv_fields(rows[5])[1] == "min");
  CHECK(csv_fields(rows[6])[1] == "max");
  for (size_t i = 4; i < 7; ++i) {
    CHECK(csv_fields(rows[i])[0] == fig3);
    CHECK(csv_fields(rows[i])[4] == "4.000000");
  }
}
