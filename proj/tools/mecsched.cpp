// mecsched: generate scenarios, run the offline and online schedulers, verify
// schedules and emit metrics.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mecsched/mecsched.hpp"

namespace fs = std::filesystem;
using namespace mecsched;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInvalid = 2;

struct Common {
  std::string scenario;
  std::string out_dir = ".";
  std::string gantt;
  bool no_timing = false;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Validates before anything is written; returns false (after reporting) on violations.
bool verify_or_report(const Schedule& schedule, const Scenario& s) {
  const ValidationReport rep = validate(schedule, s);
  for (const auto& v : rep.violations) std::cerr << "violation: " << describe(v) << '\n';
  return rep.ok();
}

double lp_bound(const Scenario& s) {
  const auto instances = enumerate_instances(s);
  return solve(build_full_relaxation(instances, s.layout())).objective;
}

void emit(const Common& c, const Scenario& s, const Schedule& schedule, const std::string& algorithm,
          const MetricsRow& row, const nlohmann::json* report) {
  fs::create_directories(c.out_dir);
  const fs::path dir(c.out_dir);
  write_text(dir / "schedule.json", schedule_to_json(schedule, s, algorithm).dump(2) + "\n");
  if (report) write_text(dir / "report.json", report->dump(2) + "\n");
  std::ostringstream csv;
  write_metrics_header(csv);
  write_metrics_row(csv, row, !c.no_timing);
  write_text(dir / "metrics.csv", csv.str());
  if (!c.gantt.empty()) {
    std::ostringstream svg;
    write_gantt_svg(svg, schedule, s);
    write_text(dir / c.gantt, svg.str());
  }
}

std::pair<double, double> parse_band(const std::vector<double>& v, const char* name) {
  if (v.empty()) return {0.0, std::numeric_limits<double>::infinity()};
  if (v.size() != 2) throw ParameterError(std::string(name) + " expects two values: LO HI");
  return {v[0], v[1]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-saving job scheduler for mobile edge computing"};
  app.require_subcommand(1);

  // generate
  GeneratorConfig gen;
  std::string gen_out = ".";
  std::string gen_name = "scenario";
  std::vector<double> ub_band, uc_band;
  auto* g = app.add_subcommand("generate", "Generate a synthetic scenario");
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--jobs", gen.jobs, "Number of jobs");
  g->add_option("--slot-ms", gen.slot_ms, "Slot length in ms");
  g->add_option("--window-ms", gen.window_ms, "Scheduling window in ms");
  g->add_option("--uplinks", gen.uplink_aps, "Uplink vAP count");
  g->add_option("--servers", gen.servers, "Server count");
  g->add_option("--downlinks", gen.downlink_aps, "Downlink vAP count");
  g->add_option("--rings", gen.rings, "Rings per vAP");
  g->add_option("--max-windows", gen.max_windows, "Coverage windows per direction (upper bound)");
  g->add_option("--ub-band", ub_band, "Target bandwidth utilization band LO HI")->expected(2);
  g->add_option("--uc-band", uc_band, "Target computation utilization band LO HI")->expected(2);
  g->add_option("--max-attempts", gen.max_attempts, "Rejection sampling attempts");
  g->add_option("--out-dir", gen_out, "Output directory");
  g->add_option("--name", gen_name, "Base name of the output files");

  // offline
  Common off;
  std::string algorithm = "lhjs";
  std::uint64_t seed = 1;
  double kappa = kDefaultKappa;
  bool dump_lp = false;
  auto* o = app.add_subcommand("offline", "Run an offline scheduler (lhjs | sortall)");
  o->add_option("--scenario", off.scenario, "Scenario JSON")->required();
  o->add_option("--algorithm", algorithm, "lhjs or sortall")->check(CLI::IsMember({"lhjs", "sortall"}));
  o->add_option("--seed", seed, "Rounding seed");
  o->add_option("--kappa", kappa, "Job selection damping (>= 1)");
  o->add_option("--out-dir", off.out_dir, "Output directory");
  o->add_flag("--dump-lp", dump_lp, "Write the LPs in CPLEX LP format");
  o->add_option("--gantt", off.gantt, "Also write a Gantt SVG with this file name");
  o->add_flag("--no-timing", off.no_timing, "Omit wall-clock fields for byte-stable output");

  // online
  Common on;
  std::string policy = "lbs";
  auto* n = app.add_subcommand("online", "Run an online policy (lbs | lbs-late | lc-early | lc-late)");
  n->add_option("--scenario", on.scenario, "Scenario JSON")->required();
  n->add_option("--policy", policy, "Online policy")->check(CLI::IsMember({"lbs", "lbs-late", "lc-early", "lc-late"}));
  n->add_option("--out-dir", on.out_dir, "Output directory");
  n->add_option("--gantt", on.gantt, "Also write a Gantt SVG with this file name");
  n->add_flag("--no-timing", on.no_timing, "Omit wall-clock fields for byte-stable output");

  // verify
  std::string v_scenario, v_schedule;
  std::vector<std::size_t> caps;
  bool v_oracle = false;
  auto* v = app.add_subcommand("verify", "Validate a schedule; optionally compare with the exact optimum");
  v->add_option("--scenario", v_scenario, "Scenario JSON")->required();
  v->add_option("--schedule", v_schedule, "Schedule JSON")->required();
  v->add_flag("--oracle", v_oracle, "Also compute the exact optimum (tiny scenarios only)");
  v->add_option("--oracle-caps", caps, "Oracle caps: MAX_JOBS MAX_INSTANCES")->expected(2);

  // report
  std::string r_scenario, r_schedule, r_algorithm = "unknown", r_gantt;
  std::uint64_t r_seed = 0;
  auto* r = app.add_subcommand("report", "Print a metrics CSV row for a schedule");
  r->add_option("--scenario", r_scenario, "Scenario JSON")->required();
  r->add_option("--schedule", r_schedule, "Schedule JSON")->required();
  r->add_option("--algorithm", r_algorithm, "Algorithm label for the row");
  r->add_option("--seed", r_seed, "Seed label for the row");
  r->add_option("--gantt", r_gantt, "Write a Gantt SVG to this path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) {
      const auto [blo, bhi] = parse_band(ub_band, "--ub-band");
      const auto [clo, chi] = parse_band(uc_band, "--uc-band");
      gen.bandwidth_band = {blo, bhi};
      gen.computation_band = {clo, chi};
      const GeneratedScenario out = generate(gen);
      fs::create_directories(gen_out);
      save_scenario(out.scenario, (fs::path(gen_out) / (gen_name + ".json")).string());
      write_text(fs::path(gen_out) / (gen_name + ".metrics.json"), metrics_json(out).dump(2) + "\n");
      for (const auto& w : out.warnings) std::cerr << "warning: job " << w << " has no feasible mapping\n";
      return 0;
    }

    if (o->parsed()) {
      const Scenario s = load_scenario(off.scenario);
      const auto t0 = std::chrono::steady_clock::now();
      const auto instances = enumerate_instances(s);
      MetricsRow row;
      row.scenario = fs::path(off.scenario).stem().string();
      row.algorithm = algorithm;
      row.seed = seed;
      row.u_b = jobset_bandwidth_utilization(s);
      row.u_c = jobset_computation_utilization(s);
      Schedule schedule;
      nlohmann::json report;
      if (algorithm == "lhjs") {
        LhjsOptions opt;
        opt.kappa = kappa;
        const LhjsPlan plan = prepare_lhjs(instances, s.layout(), opt);
        LhjsResult res = run_lhjs(plan, seed);
        row.runtime_ms = elapsed_ms(t0);
        schedule = std::move(res.schedule);
        report = lhjs_report_json(res.report, !off.no_timing);
        if (dump_lp) {
          fs::create_directories(off.out_dir);
          std::ofstream lis(fs::path(off.out_dir) / "lis.lp"), his(fs::path(off.out_dir) / "his.lp");
          write_lp_text(lis, build_lis(plan.light, s.layout()), "lis");
          write_lp_text(his, build_his(plan.heavy, s.layout()), "his");
        }
      } else {
        SortAllResult res = sort_all(instances, s.layout());
        row.runtime_ms = elapsed_ms(t0);
        schedule = std::move(res.schedule);
        report = {{"lp_optimum", res.lp_optimum}, {"instances", res.instances},
                  {"ordering_fallbacks", res.ordering_fallbacks}};
      }
      const LinearProgram full = build_full_relaxation(instances, s.layout());
      row.lp_bound = solve(full).objective;
      row.energy = schedule.total_energy;
      report["algorithm"] = algorithm;
      report["energy"] = schedule.total_energy;
      report["lp_bound"] = row.lp_bound;
      if (!verify_or_report(schedule, s)) return kExitInvalid;
      if (dump_lp) {
        fs::create_directories(off.out_dir);
        std::ofstream f(fs::path(off.out_dir) / "full.lp");
        write_lp_text(f, full, "full");
      }
      emit(off, s, schedule, algorithm, row, &report);
      std::cout << algorithm << " energy=" << format_number(schedule.total_energy)
                << " lp_bound=" << format_number(row.lp_bound) << " ratio=" << format_number(row.ratio()) << '\n';
      return 0;
    }

    if (n->parsed()) {
      const Scenario s = load_scenario(on.scenario);
      const OnlinePolicy pol = OnlinePolicy::parse(policy);
      const auto t0 = std::chrono::steady_clock::now();
      OnlineResult res = lbs(s, pol);
      MetricsRow row;
      row.runtime_ms = elapsed_ms(t0);
      row.scenario = fs::path(on.scenario).stem().string();
      row.algorithm = pol.name();
      row.energy = res.schedule.total_energy;
      row.lp_bound = lp_bound(s);
      row.u_b = jobset_bandwidth_utilization(s);
      row.u_c = jobset_computation_utilization(s);
      if (!verify_or_report(res.schedule, s)) return kExitInvalid;
      nlohmann::json report = {{"algorithm", pol.name()},
                               {"energy", res.schedule.total_energy},
                               {"lp_bound", row.lp_bound},
                               {"batches", res.batches},
                               {"candidates", res.candidates},
                               {"scheduled", res.schedule.size()},
                               {"unscheduled", res.unscheduled.size()}};
      if (!on.no_timing) report["runtime_ms"] = row.runtime_ms;
      emit(on, s, res.schedule, pol.name(), row, &report);
      std::cout << pol.name() << " energy=" << format_number(row.energy) << " lp_bound=" << format_number(row.lp_bound)
                << " ratio=" << format_number(row.ratio()) << '\n';
      return 0;
    }

    if (v->parsed()) {
      const Scenario s = load_scenario(v_scenario);
      const Schedule schedule = load_schedule(v_schedule, s);
      const ValidationReport rep = validate(schedule, s);
      for (const auto& viol : rep.violations) std::cout << "violation: " << describe(viol) << '\n';
      std::cout << (rep.ok() ? "ok" : "invalid") << " instances=" << schedule.size()
                << " energy=" << format_number(schedule.total_energy) << '\n';
      if (v_oracle || !caps.empty()) {
        OracleLimits limits;
        if (caps.size() == 2) limits = {caps[0], caps[1]};
        const auto instances = enumerate_instances(s);
        const OracleResult opt = exact_optimum(instances, s.layout(), limits);
        const double lp = solve(build_full_relaxation(instances, s.layout())).objective;
        std::cout << "optimum=" << format_number(opt.energy) << " lp_bound=" << format_number(lp)
                  << " ratio_to_optimum=" << format_number(opt.energy > 0 ? schedule.total_energy / opt.energy : 0.0)
                  << '\n';
      }
      return rep.ok() ? 0 : kExitInvalid;
    }

    if (r->parsed()) {
      const Scenario s = load_scenario(r_scenario);
      const Schedule schedule = load_schedule(r_schedule, s);
      if (!verify_or_report(schedule, s)) return kExitInvalid;
      MetricsRow row;
      row.scenario = fs::path(r_scenario).stem().string();
      row.algorithm = r_algorithm;
      row.seed = r_seed;
      row.energy = schedule.total_energy;
      row.lp_bound = lp_bound(s);
      row.u_b = jobset_bandwidth_utilization(s);
      row.u_c = jobset_computation_utilization(s);
      write_metrics_header(std::cout);
      write_metrics_row(std::cout, row, false);
      if (!r_gantt.empty()) {
        std::ostringstream svg;
        write_gantt_svg(svg, schedule, s);
        write_text(r_gantt, svg.str());
      }
      return 0;
    }
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
