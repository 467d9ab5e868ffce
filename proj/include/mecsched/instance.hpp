#pragma once

// Schedule instances: fully bound (mapping, allocation, three start times)
// candidates for one job, the variables of the offline ILP.

#include <algorithm>
#include <array>
#include <cstddef>
#include <ostream>
#include <tuple>
#include <utility>
#include <vector>

#include "mecsched/model.hpp"

namespace mecsched {

// Closed slot interval [start, end].
struct Interval {
  int start = 1;
  int end = 1;

  int length() const { return end - start + 1; }
  bool contains(int t) const { return start <= t && t <= end; }
  bool overlaps(const Interval& o) const { return start <= o.end && o.start <= end; }
  friend bool operator==(const Interval&, const Interval&) = default;
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

enum class Operation { offload, process, download };

struct ScheduleInstance {
  std::size_t job = 0;
  std::size_t uplink_vap = 0;
  std::size_t server = 0;
  std::size_t downlink_vap = 0;
  std::size_t uplink_window = 0;    // index into Job::windows
  std::size_t downlink_window = 0;  // index into Job::windows
  Interval offload;
  Interval process;
  Interval download;
  double allocation = 1.0;
  double energy = 0.0;

  // Ordering used everywhere instances are listed.
  auto key() const {
    return std::tuple(job, uplink_vap, server, downlink_vap, allocation, offload.start, process.start,
                      download.start, uplink_window, downlink_window);
  }
  friend bool operator==(const ScheduleInstance& a, const ScheduleInstance& b) {
    return a.key() == b.key() && a.offload == b.offload && a.process == b.process && a.download == b.download &&
           a.energy == b.energy;
  }
};

// One operation interval bound to a flat machine id, with its capacity demand.
struct OperationInterval {
  std::size_t machine = 0;
  Interval interval;
  double demand = 1.0;
  Operation op = Operation::offload;
};

inline std::array<OperationInterval, 3> operations(const ScheduleInstance& l, const MachineLayout& layout) {
  return {OperationInterval{layout.uplink(l.uplink_vap), l.offload, 1.0, Operation::offload},
          OperationInterval{layout.server(l.server), l.process, l.allocation, Operation::process},
          OperationInterval{layout.downlink(l.downlink_vap), l.download, 1.0, Operation::download}};
}

// True iff some operation interval of the instance runs on `machine` at slot t.
inline bool indicator(const MachineLayout& layout, std::size_t machine, int t, const ScheduleInstance& l) {
  for (const auto& op : operations(l, layout))
    if (op.machine == machine && op.interval.contains(t)) return true;
  return false;
}

inline bool is_light(const ScheduleInstance& l) { return l.allocation <= 0.5; }

struct LightHeavySplit {
  std::vector<ScheduleInstance> light;
  std::vector<ScheduleInstance> heavy;
};

inline LightHeavySplit split_light_heavy(const std::vector<ScheduleInstance>& instances) {
  LightHeavySplit out;
  for (const auto& l : instances) (is_light(l) ? out.light : out.heavy).push_back(l);
  return out;
}

struct EnumerationOptions {
  std::size_t max_instances = 5'000'000;
};

// All instances with positive saved energy, ordered by ScheduleInstance::key().
// Start-time ranges are tightened directly from the timing constraints.
inline std::vector<ScheduleInstance> enumerate_instances(const Scenario& s, const EnumerationOptions& opt = {}) {
  std::vector<ScheduleInstance> all;
  for (std::size_t j = 0; j < s.jobs.size(); ++j) {
    const Job& job = s.jobs[j];
    const std::size_t first = all.size();
    for (std::size_t wu = 0; wu < job.windows.size(); ++wu) {
      const CoverageWindow& up = job.windows[wu];
      if (up.direction != Direction::uplink) continue;
      const int du = offload_duration(s, job, up);
      const int tu_lo = std::max(job.release, up.start);
      const int tu_hi = up.end - du + 1;
      if (tu_lo > tu_hi) continue;
      for (std::size_t wd = 0; wd < job.windows.size(); ++wd) {
        const CoverageWindow& down = job.windows[wd];
        if (down.direction != Direction::downlink) continue;
        const double energy = saved_energy(s, job, up, down);
        if (!(energy > 0.0)) continue;
        const int dd = download_duration(s, job, down);
        const int td_hi = std::min(down.end, job.deadline) - dd + 1;
        if (down.start > td_hi) continue;
        for (std::size_t p : job.capable) {
          const int dup = forward_duration(s, job.input_mb, up.vap_id, s.servers[p].id);
          const int dpd = forward_duration(s, job.output_mb, s.servers[p].id, down.vap_id);
          const auto& options = s.servers[p].options;
          for (std::size_t k = 0; k < options.size(); ++k) {
            const int dp = job.processing_duration(p, k);
            const int tp_hi = td_hi - dp - dpd;
            for (int tu = tu_lo; tu <= tu_hi; ++tu) {
              for (int tp = tu + du + dup; tp <= tp_hi; ++tp) {
                for (int td = std::max(down.start, tp + dp + dpd); td <= td_hi; ++td) {
                  if (all.size() >= opt.max_instances) throw EnumerationOverflow(job.id, opt.max_instances);
                  ScheduleInstance l;
                  l.job = j;
                  l.uplink_vap = up.vap;
                  l.server = p;
                  l.downlink_vap = down.vap;
                  l.uplink_window = wu;
                  l.downlink_window = wd;
                  l.offload = {tu, tu + du - 1};
                  l.process = {tp, tp + dp - 1};
                  l.download = {td, td + dd - 1};
                  l.allocation = options[k];
                  l.energy = energy;
                  all.push_back(l);
                }
              }
            }
          }
        }
      }
    }
    std::sort(all.begin() + static_cast<std::ptrdiff_t>(first), all.end(),
              [](const ScheduleInstance& a, const ScheduleInstance& b) { return a.key() < b.key(); });
  }
  return all;
}

// Groups instance indices by job; result[j] lists positions in `instances`.
inline std::vector<std::vector<std::size_t>> group_by_job(const std::vector<ScheduleInstance>& instances,
                                                          std::size_t job_count) {
  std::vector<std::vector<std::size_t>> groups(job_count);
  for (std::size_t i = 0; i < instances.size(); ++i) groups.at(instances[i].job).push_back(i);
  return groups;
}

inline void write_instances_csv(std::ostream& out, const Scenario& s, const std::vector<ScheduleInstance>& instances) {
  out << "job,uplink_vap,server,downlink_vap,offload_start,offload_end,process_start,process_end,"
         "download_start,download_end,allocation,energy_j\n";
  for (const auto& l : instances) {
    out << s.jobs[l.job].id << ',' << s.uplink_aps[l.uplink_vap].id << ',' << s.servers[l.server].id << ','
        << s.downlink_aps[l.downlink_vap].id << ',' << l.offload.start << ',' << l.offload.end << ','
        << l.process.start << ',' << l.process.end << ',' << l.download.start << ',' << l.download.end << ','
        << l.allocation << ',' << l.energy << '\n';
  }
}

}  // namespace mecsched
