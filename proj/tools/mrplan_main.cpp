#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrplan/cbm.hpp"
#include "mrplan/highways.hpp"
#include "mrplan/json_io.hpp"
#include "mrplan/scenario.hpp"
#include "mrplan/svg.hpp"

namespace {

using mrplan::DeltaBoundError;
using mrplan::InputError;
using mrplan::PlanStatus;
using mrplan::StnInconsistentError;

constexpr int kOk = 0;
constexpr int kInvalidInput = 2;
constexpr int kInfeasible = 3;
constexpr int kTimeout = 4;
constexpr int kExecutionFailure = 5;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
}

int plan_exit_code(PlanStatus status) {
  switch (status) {
    case PlanStatus::ok:
      return kOk;
    case PlanStatus::infeasible:
      return kInfeasible;
    case PlanStatus::timeout:
      return kTimeout;
  }
  return kInvalidInput;
}

struct CommonFlags {
  std::string scenario;
  std::string out;
  std::string svg;
  std::string traj;
  std::string stn_dump_path;
  std::string plan_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> timeout_s;
  int threads = 1;
};

mrplan::Scenario load_with_overrides(const CommonFlags& flags) {
  mrplan::Scenario sc = mrplan::load_scenario(flags.scenario);
  if (flags.seed) sc.sim.seed = *flags.seed;
  if (flags.timeout_s) sc.planner.timeout_s = *flags.timeout_s;
  return sc;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int cmd_plan(const CommonFlags& flags) {
  const mrplan::Scenario sc = load_with_overrides(flags);
  const mrplan::PipelineResult pr = mrplan::run_pipeline(sc, false, false);
  if (pr.plan.status != PlanStatus::ok) {
    std::cout << "plan status="
              << (pr.plan.status == PlanStatus::infeasible ? "infeasible" : "timeout")
              << " planning_time_s=" << fmt(pr.planning_time_s) << "\n";
    return plan_exit_code(pr.plan.status);
  }
  std::cout << "plan status=ok makespan=" << pr.plan.plan.makespan()
            << " flowtime=" << pr.plan.plan.flowtime()
            << " lower_bound=" << fmt(pr.plan.lower_bound)
            << " high_level_expansions=" << pr.plan.high_level_expansions
            << " planning_time_s=" << fmt(pr.planning_time_s) << "\n";
  const nlohmann::json doc = mrplan::plan_to_json(pr.plan.plan, sc.instance.graph);
  if (!flags.out.empty()) {
    write_file(flags.out, doc.dump(2) + "\n");
  } else {
    std::cout << doc.dump(2) << "\n";
  }
  return kOk;
}

void write_post_outputs(const mrplan::PostResult& post, const CommonFlags& flags) {
  const std::vector<double> slack = mrplan::stn_slack(post.stn, post.times);
  double min_slack = mrplan::kUnbounded;
  for (size_t e = 1; e < slack.size(); ++e) min_slack = std::min(min_slack, slack[e]);
  std::cout << "post events=" << post.stn.events << " arcs=" << post.stn.arcs.size()
            << " makespan_s=" << fmt(post.schedule.makespan()) << " min_slack_s="
            << (min_slack == mrplan::kUnbounded ? std::string("inf") : fmt(min_slack))
            << " delta=" << fmt(post.delta) << "\n";
  const nlohmann::json doc = mrplan::schedule_to_json(post.schedule);
  if (!flags.out.empty()) {
    write_file(flags.out, doc.dump(2) + "\n");
  } else {
    std::cout << doc.dump(2) << "\n";
  }
  if (!flags.stn_dump_path.empty()) {
    write_file(flags.stn_dump_path, mrplan::stn_dump(post.stn));
  }
}

int cmd_post(const CommonFlags& flags) {
  const mrplan::Scenario sc = load_with_overrides(flags);
  if (!flags.plan_path.empty()) {
    std::ifstream in(flags.plan_path);
    if (!in) throw InputError("cannot open '" + flags.plan_path + "'");
    nlohmann::json doc;
    in >> doc;
    const mrplan::DiscretePlan plan = mrplan::plan_from_json(doc, sc.instance.graph);
    const mrplan::PostResult post =
        mrplan::post_process(plan, sc.instance.graph, sc.post);
    write_post_outputs(post, flags);
    return kOk;
  }
  const mrplan::PipelineResult pr = mrplan::run_pipeline(sc, true, false);
  if (pr.plan.status != PlanStatus::ok) return plan_exit_code(pr.plan.status);
  write_post_outputs(*pr.post, flags);
  return kOk;
}

int cmd_simulate(const CommonFlags& flags) {
  const mrplan::Scenario sc = load_with_overrides(flags);
  const mrplan::PipelineResult pr = mrplan::run_pipeline(sc, true, true);
  if (pr.plan.status != PlanStatus::ok) return plan_exit_code(pr.plan.status);
  const mrplan::RunResult& run = *pr.run;
  std::cout << "simulate ok=" << (run.ok ? 1 : 0)
            << " runtime_s=" << fmt(run.metrics.runtime_s)
            << " min_pairwise_distance_m=" << fmt(run.metrics.min_pairwise_distance_m)
            << " avg_time_to_target_s=" << fmt(run.metrics.avg_time_to_target_s)
            << " stn_resolves=" << run.metrics.stn_resolves
            << " replans=" << run.metrics.replans;
  if (!run.ok) std::cout << " failure=\"" << run.failure << "\"";
  std::cout << "\n";
  if (!flags.out.empty()) {
    write_file(flags.out, mrplan::metrics_to_json(run.metrics).dump(2) + "\n");
  }
  if (!flags.traj.empty()) {
    write_file(flags.traj, mrplan::trajectory_to_jsonl(run.log));
  }
  if (!flags.svg.empty()) {
    write_file(flags.svg, mrplan::render_svg(sc.instance.graph, run.log));
  }
  if (run.ok) return kOk;
  return run.timed_out ? kTimeout : kExecutionFailure;
}

struct BenchRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string status;
  double planning_time_s = 0.0;
  double schedule_makespan_s = 0.0;
  mrplan::Metrics metrics;
  bool numeric = false;  // metrics columns are meaningful
};

std::string csv_cell(double v, bool present) { return present ? fmt(v) : std::string(); }

int cmd_bench(const CommonFlags& flags, const std::string& suite_path) {
  std::ifstream in(suite_path);
  if (!in) throw InputError("cannot open '" + suite_path + "'");
  nlohmann::json suite;
  in >> suite;
  const std::filesystem::path base = std::filesystem::path(suite_path).parent_path();

  struct Job {
    std::string label;
    std::filesystem::path path;
    std::uint64_t seed = 0;
  };
  std::vector<Job> jobs;
  for (const nlohmann::json& entry : suite.at("scenarios")) {
    const std::string rel = entry.at("path").get<std::string>();
    std::vector<std::uint64_t> seeds;
    if (auto it = entry.find("seeds"); it != entry.end()) {
      for (const nlohmann::json& s : *it) seeds.push_back(s.get<std::uint64_t>());
    } else if (auto r = entry.find("repeats"); r != entry.end()) {
      for (std::uint64_t s = 0; s < r->get<std::uint64_t>(); ++s) seeds.push_back(s);
    } else {
      seeds.push_back(0);
    }
    for (std::uint64_t s : seeds) jobs.push_back({rel, base / rel, s});
  }

  std::vector<BenchRow> rows(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      BenchRow& row = rows[i];
      row.scenario = jobs[i].label;
      row.seed = jobs[i].seed;
      try {
        mrplan::Scenario sc = mrplan::load_scenario(jobs[i].path);
        sc.sim.seed = jobs[i].seed;
        const mrplan::PipelineResult pr = mrplan::run_pipeline(sc, true, true);
        row.planning_time_s = pr.planning_time_s;
        if (pr.plan.status != PlanStatus::ok) {
          row.status =
              pr.plan.status == PlanStatus::infeasible ? "infeasible" : "timeout";
          continue;
        }
        row.schedule_makespan_s = pr.post->schedule.makespan();
        row.metrics = pr.run->metrics;
        row.numeric = true;
        if (pr.run->ok) {
          row.status = "ok";
        } else {
          row.status = pr.run->timed_out ? "sim_timeout" : "sim_failure";
        }
      } catch (const std::exception& err) {
        row.status = "error";
        std::cerr << jobs[i].label << " seed " << jobs[i].seed << ": " << err.what()
                  << "\n";
      }
    }
  };
  const int threads = std::max(1, flags.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::ostringstream csv;
  csv << "scenario,seed,status,planning_time_s,schedule_makespan_s,runtime_s,"
         "min_pairwise_distance_m,avg_time_to_target_s,stn_resolves,replans\n";
  auto emit = [&](const BenchRow& r, const std::string& seed_label) {
    csv << r.scenario << ',' << seed_label << ',' << r.status << ','
        << csv_cell(r.planning_time_s, true) << ','
        << csv_cell(r.schedule_makespan_s, r.numeric) << ','
        << csv_cell(r.metrics.runtime_s, r.numeric) << ','
        << csv_cell(r.metrics.min_pairwise_distance_m, r.numeric) << ','
        << csv_cell(r.metrics.avg_time_to_target_s, r.numeric) << ','
        << (r.numeric ? std::to_string(r.metrics.stn_resolves) : std::string()) << ','
        << (r.numeric ? std::to_string(r.metrics.replans) : std::string()) << '\n';
  };
  for (const BenchRow& r : rows) emit(r, std::to_string(r.seed));

  // Aggregate rows (mean/min/max over the numeric runs of each scenario),
  // appended in first-appearance order.
  std::vector<std::string> order;
  for (const BenchRow& r : rows) {
    if (std::find(order.begin(), order.end(), r.scenario) == order.end()) {
      order.push_back(r.scenario);
    }
  }
  for (const std::string& name : order) {
    std::vector<const BenchRow*> group;
    for (const BenchRow& r : rows) {
      if (r.scenario == name && r.numeric) group.push_back(&r);
    }
    if (group.empty()) continue;
    auto agg = [&](const char* label, auto pick) {
      BenchRow a;
      a.scenario = name;
      a.status = label;
      a.numeric = true;
      std::vector<double> plan_t, mk, rt, md, at;
      std::vector<int> sr, rp;
      for (const BenchRow* r : group) {
        plan_t.push_back(r->planning_time_s);
        mk.push_back(r->schedule_makespan_s);
        rt.push_back(r->metrics.runtime_s);
        md.push_back(r->metrics.min_pairwise_distance_m);
        at.push_back(r->metrics.avg_time_to_target_s);
        sr.push_back(r->metrics.stn_resolves);
        rp.push_back(r->metrics.replans);
      }
      a.planning_time_s = pick(plan_t);
      a.schedule_makespan_s = pick(mk);
      a.metrics.runtime_s = pick(rt);
      a.metrics.min_pairwise_distance_m = pick(md);
      a.metrics.avg_time_to_target_s = pick(at);
      std::vector<double> srd(sr.begin(), sr.end()), rpd(rp.begin(), rp.end());
      a.metrics.stn_resolves = static_cast<int>(pick(srd));
      a.metrics.replans = static_cast<int>(pick(rpd));
      emit(a, label);
    };
    agg("mean", [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    });
    agg("min", [](const std::vector<double>& v) {
      return *std::min_element(v.begin(), v.end());
    });
    agg("max", [](const std::vector<double>& v) {
      return *std::max_element(v.begin(), v.end());
    });
  }

  if (!flags.out.empty()) {
    write_file(flags.out, csv.str());
  } else {
    std::cout << csv.str();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot path planning: plan, schedule, simulate, benchmark"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string suite_path;

  auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario) {
      cmd->add_option("--scenario", flags.scenario, "Scenario JSON file")->required();
    }
    cmd->add_option("--out", flags.out, "Output artifact path");
    cmd->add_option("--seed", flags.seed, "Override the scenario RNG seed");
    cmd->add_option("--timeout", flags.timeout_s, "Planner timeout in seconds");
  };

  CLI::App* plan = app.add_subcommand("plan", "Plan a scenario and write the plan");
  add_common(plan, true);

  CLI::App* post =
      app.add_subcommand("post", "Post-process a plan into a timed schedule");
  add_common(post, true);
  post->add_option("--plan", flags.plan_path, "Use this plan file instead of planning");
  post->add_option("--stn-dump", flags.stn_dump_path, "Write the STN arc list here");

  CLI::App* sim = app.add_subcommand("simulate", "Run the full pipeline and execute");
  add_common(sim, true);
  sim->add_option("--log", flags.traj, "Write the trajectory log (JSON lines)");
  sim->add_option("--svg", flags.svg, "Render executed trajectories to SVG");

  CLI::App* bench = app.add_subcommand("bench", "Run a scenario suite to CSV");
  bench->add_option("--suite", suite_path, "Suite JSON file")->required();
  bench->add_option("--out", flags.out, "CSV output path");
  bench->add_option("--threads", flags.threads, "Parallel workers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) return cmd_plan(flags);
    if (post->parsed()) return cmd_post(flags);
    if (sim->parsed()) return cmd_simulate(flags);
    if (bench->parsed()) return cmd_bench(flags, suite_path);
  } catch (const DeltaBoundError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalidInput;
  } catch (const StnInconsistentError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInfeasible;
  } catch (const InputError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalidInput;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 1;
  }
  return kInvalidInput;
}
