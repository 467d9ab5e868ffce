#pragma once

// Trust anchors: a slot-by-slot schedule validator, an exhaustive optimum for
// tiny instance sets, and a literal (untightened) instance enumerator.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "mecsched/error.hpp"
#include "mecsched/instance.hpp"
#include "mecsched/model.hpp"
#include "mecsched/schedule.hpp"

namespace mecsched {

// --------------------------------------------------------------- validator

struct Violation {
  std::string constraint;  // e.g. "vap-exclusive", "server-capacity", "deadline"
  std::string machine;     // empty for per-job constraints
  int slot = 0;            // 0 when not slot-specific
  std::vector<std::string> jobs;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline void check_instance(const Scenario& s, const ScheduleInstance& l, std::vector<Violation>& out) {
  auto fail = [&](const char* id, std::string machine, int slot, std::string detail) {
    const std::string job = l.job < s.jobs.size() ? s.jobs[l.job].id : "#" + std::to_string(l.job);
    out.push_back({id, std::move(machine), slot, {job}, std::move(detail)});
  };
  if (l.job >= s.jobs.size()) return fail("capability", "", 0, "unknown job index");
  const Job& job = s.jobs[l.job];
  if (l.uplink_window >= job.windows.size() || l.downlink_window >= job.windows.size())
    return fail("capability", "", 0, "window index out of range");
  const CoverageWindow& up = job.windows[l.uplink_window];
  const CoverageWindow& down = job.windows[l.downlink_window];
  if (up.direction != Direction::uplink || up.vap != l.uplink_vap || l.uplink_vap >= s.uplink_aps.size())
    return fail("capability", "", 0, "offload vAP does not match an uplink window of the job");
  if (down.direction != Direction::downlink || down.vap != l.downlink_vap || l.downlink_vap >= s.downlink_aps.size())
    return fail("capability", "", 0, "download vAP does not match a downlink window of the job");
  if (std::find(job.capable.begin(), job.capable.end(), l.server) == job.capable.end())
    return fail("capability", l.server < s.servers.size() ? s.servers[l.server].id : "", 0, "server not capable");
  const Server& sv = s.servers[l.server];
  auto opt = std::find(sv.options.begin(), sv.options.end(), l.allocation);
  if (opt == sv.options.end()) return fail("capability", sv.id, 0, "allocation is not an option of the server");

  const int du = offload_duration(s, job, up);
  const int dd = download_duration(s, job, down);
  const int dp = job.processing_duration(l.server, static_cast<std::size_t>(opt - sv.options.begin()));
  const int dup = forward_duration(s, job.input_mb, up.vap_id, sv.id);
  const int dpd = forward_duration(s, job.output_mb, sv.id, down.vap_id);
  const int tu = l.offload.start, tp = l.process.start, td = l.download.start;
  const std::string& mu = s.uplink_aps[l.uplink_vap].id;
  const std::string& md = s.downlink_aps[l.downlink_vap].id;

  if (l.offload.length() != du) fail("duration", mu, tu, "offload length " + std::to_string(l.offload.length()) + " != " + std::to_string(du));
  if (l.process.length() != dp) fail("duration", sv.id, tp, "processing length " + std::to_string(l.process.length()) + " != " + std::to_string(dp));
  if (l.download.length() != dd) fail("duration", md, td, "download length " + std::to_string(l.download.length()) + " != " + std::to_string(dd));
  if (tu < job.release) fail("release", mu, tu, "offload starts before release");
  if (tu < up.start || tu + du - 1 > up.end) fail("uplink-window", mu, tu, "offload outside its coverage window");
  if (tu + du + dup > tp) fail("uplink-forward", sv.id, tp, "processing starts before input arrives");
  if (tp + dp + dpd > td) fail("downlink-forward", md, td, "download starts before output arrives");
  if (td < down.start || td + dd - 1 > down.end) fail("downlink-window", md, td, "download outside its coverage window");
  if (td + dd - 1 > job.deadline) fail("deadline", md, td + dd - 1, "download ends after the deadline");
  for (const Interval& iv : {l.offload, l.process, l.download})
    if (iv.start < 1 || iv.end > s.time_grid.horizon) fail("horizon", "", iv.start, "interval outside [1, horizon]");
  const double e = saved_energy(s, job, up, down);
  if (!(e > 0.0)) fail("energy", "", 0, "saved energy is not positive");
  if (std::abs(e - l.energy) > 1e-12 * std::max(1.0, std::abs(e)))
    fail("energy", "", 0, "recorded energy differs from the model");
}

}  // namespace detail

inline ValidationReport validate(const Schedule& schedule, const Scenario& s) {
  ValidationReport rep;
  for (const auto& l : schedule.selected) detail::check_instance(s, l, rep.violations);
  if (!rep.ok()) return rep;  // global rows need well-formed instances

  std::map<std::size_t, std::vector<std::string>> per_job;
  for (const auto& l : schedule.selected) per_job[l.job].push_back(s.jobs[l.job].id);
  for (const auto& [j, ids] : per_job)
    if (ids.size() > 1) rep.violations.push_back({"one-per-job", "", 0, ids, "job selected more than once"});

  const MachineLayout layout = s.layout();
  const int horizon = s.time_grid.horizon;
  for (std::size_t m = 0; m < layout.count(); ++m) {
    for (int t = 1; t <= horizon; ++t) {
      double used = 0.0;
      std::vector<std::string> jobs;
      for (const auto& l : schedule.selected) {
        if (!indicator(layout, m, t, l)) continue;
        used += layout.is_server(m) ? l.allocation : 1.0;
        jobs.push_back(s.jobs[l.job].id);
      }
      if (used > 1.0 + kCapacityTolerance)
        rep.violations.push_back({layout.is_server(m) ? "server-capacity" : "vap-exclusive", s.machine_name(m), t, jobs,
                                  "used " + std::to_string(used)});
    }
  }
  return rep;
}

inline std::string describe(const Violation& v) {
  std::string out = v.constraint;
  if (!v.machine.empty()) out += " machine=" + v.machine;
  if (v.slot != 0) out += " slot=" + std::to_string(v.slot);
  out += " jobs=";
  for (std::size_t i = 0; i < v.jobs.size(); ++i) out += (i ? "," : "") + v.jobs[i];
  if (!v.detail.empty()) out += " (" + v.detail + ")";
  return out;
}

// ---------------------------------------------------------- exact optimum

struct OracleLimits {
  std::size_t max_jobs = 8;
  std::size_t max_instances = 20'000;
};

struct OracleResult {
  double energy = 0.0;
  Schedule witness;
  std::size_t nodes = 0;
};

namespace detail {

class ExactSearch {
 public:
  ExactSearch(const std::vector<ScheduleInstance>& instances, const MachineLayout& layout,
              std::vector<std::vector<std::size_t>> jobs)
      : inst_(instances), layout_(layout), jobs_(std::move(jobs)) {
    int horizon = 0;
    for (const auto& l : inst_) horizon = std::max({horizon, l.offload.end, l.process.end, l.download.end});
    width_ = static_cast<std::size_t>(horizon) + 1;
    load_.assign(layout_.count() * width_, 0.0);
    suffix_.assign(jobs_.size() + 1, 0.0);
    for (std::size_t k = jobs_.size(); k-- > 0;) {
      double best = 0.0;
      for (std::size_t i : jobs_[k]) best = std::max(best, inst_[i].energy);
      suffix_[k] = suffix_[k + 1] + best;
      // Try high-energy instances first; the choice order does not affect the optimum.
      std::stable_sort(jobs_[k].begin(), jobs_[k].end(),
                       [&](std::size_t a, std::size_t b) { return inst_[a].energy > inst_[b].energy; });
    }
  }

  OracleResult run() {
    dfs(0, 0.0);
    OracleResult r;
    r.energy = best_;
    for (std::size_t i : best_set_) r.witness.add(inst_[i]);
    r.witness.normalize();
    r.nodes = nodes_;
    return r;
  }

 private:
  bool fits(const ScheduleInstance& l) const {
    for (const auto& op : operations(l, layout_))
      for (int t = op.interval.start; t <= op.interval.end; ++t)
        if (load_[op.machine * width_ + static_cast<std::size_t>(t)] + op.demand > 1.0 + kCapacityTolerance) return false;
    return true;
  }

  void apply(const ScheduleInstance& l, double sign) {
    for (const auto& op : operations(l, layout_))
      for (int t = op.interval.start; t <= op.interval.end; ++t)
        load_[op.machine * width_ + static_cast<std::size_t>(t)] += sign * op.demand;
  }

  void dfs(std::size_t k, double value) {
    ++nodes_;
    if (value > best_) {
      best_ = value;
      best_set_ = current_;
    }
    if (k == jobs_.size() || value + suffix_[k] <= best_) return;
    // Each remaining job contributes at most its best instance that still fits.
    double bound = value;
    for (std::size_t r = k; r < jobs_.size() && bound + suffix_[r] > best_; ++r)
      for (std::size_t i : jobs_[r])
        if (fits(inst_[i])) {
          bound += inst_[i].energy;
          break;
        }
    if (bound <= best_) return;
    for (std::size_t i : jobs_[k]) {
      const ScheduleInstance& l = inst_[i];
      if (value + l.energy + suffix_[k + 1] <= best_) continue;
      if (!fits(l)) continue;
      apply(l, 1.0);
      current_.push_back(i);
      dfs(k + 1, value + l.energy);
      current_.pop_back();
      apply(l, -1.0);
    }
    dfs(k + 1, value);
  }

  const std::vector<ScheduleInstance>& inst_;
  MachineLayout layout_;
  std::vector<std::vector<std::size_t>> jobs_;
  std::size_t width_ = 1;
  std::vector<double> load_;
  std::vector<double> suffix_;
  std::vector<std::size_t> current_, best_set_;
  double best_ = 0.0;
  std::size_t nodes_ = 0;
};

}  // namespace detail

// Integral optimum over `instances` by depth-first search. `job_order` lists job
// indices in the order they are branched on (default: highest best energy first).
inline OracleResult exact_optimum(const std::vector<ScheduleInstance>& instances, const MachineLayout& layout,
                                  const OracleLimits& limits = {}, std::vector<std::size_t> job_order = {}) {
  std::map<std::size_t, std::vector<std::size_t>> by_job;
  for (std::size_t i = 0; i < instances.size(); ++i) by_job[instances[i].job].push_back(i);
  if (by_job.size() > limits.max_jobs)
    throw OracleRefused("exact optimum refused: " + std::to_string(by_job.size()) + " jobs exceed the cap of " +
                        std::to_string(limits.max_jobs));
  if (instances.size() > limits.max_instances)
    throw OracleRefused("exact optimum refused: " + std::to_string(instances.size()) + " instances exceed the cap of " +
                        std::to_string(limits.max_instances));
  // Instances of one job that occupy the same machine slots are interchangeable; keep the best.
  for (auto& [j, list] : by_job) {
    std::map<std::tuple<std::size_t, Interval, std::size_t, Interval, double, std::size_t, Interval>, std::size_t> seen;
    std::vector<std::size_t> kept;
    for (std::size_t i : list) {
      const ScheduleInstance& l = instances[i];
      const auto key = std::tuple(l.uplink_vap, l.offload, l.server, l.process, l.allocation, l.downlink_vap, l.download);
      auto [it, fresh] = seen.try_emplace(key, kept.size());
      if (fresh) kept.push_back(i);
      else if (l.energy > instances[kept[it->second]].energy) kept[it->second] = i;
    }
    list = std::move(kept);
  }
  if (job_order.empty()) {
    std::map<std::size_t, double> top;
    for (const auto& [j, list] : by_job) {
      job_order.push_back(j);
      for (std::size_t i : list) top[j] = std::max(top[j], instances[i].energy);
    }
    std::stable_sort(job_order.begin(), job_order.end(), [&](std::size_t a, std::size_t b) { return top[a] > top[b]; });
  }
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t j : job_order) {
    auto it = by_job.find(j);
    if (it != by_job.end()) groups.push_back(it->second);
  }
  return detail::ExactSearch(instances, layout, std::move(groups)).run();
}

// ------------------------------------------------------ literal enumerator

// Every (window pair, server, option, t_u, t_p, t_d) with all start times in
// [1, horizon], kept when each timing constraint holds and energy is positive.
inline std::vector<ScheduleInstance> literal_instances(const Scenario& s) {
  std::vector<ScheduleInstance> out;
  const int horizon = s.time_grid.horizon;
  for (std::size_t j = 0; j < s.jobs.size(); ++j) {
    const Job& job = s.jobs[j];
    for (std::size_t a = 0; a < job.windows.size(); ++a) {
      for (std::size_t b = 0; b < job.windows.size(); ++b) {
        const CoverageWindow& up = job.windows[a];
        const CoverageWindow& down = job.windows[b];
        if (up.direction != Direction::uplink || down.direction != Direction::downlink) continue;
        const double e = local_energy(s, job) -
                         job.offload_power_w * slots_to_seconds(s, offload_duration(s, job, up)) -
                         job.download_power_w * slots_to_seconds(s, download_duration(s, job, down));
        for (std::size_t p = 0; p < s.servers.size(); ++p) {
          if (std::find(job.capable_servers.begin(), job.capable_servers.end(), s.servers[p].id) ==
              job.capable_servers.end())
            continue;
          for (std::size_t k = 0; k < s.servers[p].options.size(); ++k) {
            const int du = offload_duration(s, job, up);
            const int dd = download_duration(s, job, down);
            const int dp = job.processing_duration(p, k);
            const int dup = forward_duration(s, job.input_mb, up.vap_id, s.servers[p].id);
            const int dpd = forward_duration(s, job.output_mb, s.servers[p].id, down.vap_id);
            for (int tu = 1; tu <= horizon; ++tu)
              for (int tp = 1; tp <= horizon; ++tp)
                for (int td = 1; td <= horizon; ++td) {
                  const bool ok = job.release <= tu && up.start <= tu && tu + du - 1 <= up.end &&
                                  tu + du + dup <= tp && tp + dp + dpd <= td && down.start <= td &&
                                  td + dd - 1 <= down.end && td + dd - 1 <= job.deadline && e > 0.0;
                  if (!ok) continue;
                  ScheduleInstance l;
                  l.job = j;
                  l.uplink_vap = up.vap;
                  l.server = p;
                  l.downlink_vap = down.vap;
                  l.uplink_window = a;
                  l.downlink_window = b;
                  l.offload = {tu, tu + du - 1};
                  l.process = {tp, tp + dp - 1};
                  l.download = {td, td + dd - 1};
                  l.allocation = s.servers[p].options[k];
                  l.energy = e;
                  out.push_back(l);
                }
          }
        }
      }
    }
  }
  return out;
}

inline std::vector<std::size_t> independent_instance_count(const Scenario& s) {
  std::vector<std::size_t> count(s.jobs.size(), 0);
  for (const auto& l : literal_instances(s)) ++count[l.job];
  return count;
}

}  // namespace mecsched
