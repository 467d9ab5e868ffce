#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "mecsched/instance.hpp"

namespace mecsched {

// A set of selected instances, at most one per job.
struct Schedule {
  std::vector<ScheduleInstance> selected;
  double total_energy = 0.0;

  void add(const ScheduleInstance& l) {
    selected.push_back(l);
    total_energy += l.energy;
  }
  bool empty() const { return selected.empty(); }
  std::size_t size() const { return selected.size(); }

  // Canonical order (by job, then instance key) so equal schedules serialize identically.
  void normalize() {
    std::sort(selected.begin(), selected.end(),
              [](const ScheduleInstance& a, const ScheduleInstance& b) { return a.key() < b.key(); });
    total_energy = 0.0;
    for (const auto& l : selected) total_energy += l.energy;
  }
};

// Per-(machine, slot) used capacity fraction. vAP slots hold 0 or 1.
class CapacityLedger {
 public:
  CapacityLedger(const MachineLayout& layout, int horizon)
      : layout_(layout), width_(static_cast<std::size_t>(std::max(horizon, 0)) + 2),
        used_(layout.count() * width_, 0.0) {}

  const MachineLayout& layout() const { return layout_; }
  int horizon() const { return static_cast<int>(width_) - 2; }

  double usage(std::size_t machine, int t) const { return used_[cell(machine, t)]; }

  bool fits(std::size_t machine, const Interval& iv, double demand) const {
    for (int t = iv.start; t <= iv.end; ++t)
      if (used_[cell(machine, t)] + demand > 1.0 + kCapacityTolerance) return false;
    return true;
  }

  bool fits(const ScheduleInstance& l) const {
    for (const auto& op : operations(l, layout_))
      if (!fits(op.machine, op.interval, op.demand)) return false;
    return true;
  }

  void reserve(std::size_t machine, const Interval& iv, double demand) {
    for (int t = iv.start; t <= iv.end; ++t) used_[cell(machine, t)] += demand;
  }

  void reserve(const ScheduleInstance& l) {
    for (const auto& op : operations(l, layout_)) reserve(op.machine, op.interval, op.demand);
  }

 private:
  std::size_t cell(std::size_t machine, int t) const {
    return machine * width_ + static_cast<std::size_t>(std::clamp<int>(t, 0, static_cast<int>(width_) - 1));
  }

  MachineLayout layout_;
  std::size_t width_;
  std::vector<double> used_;
};

// Latest slot touched by any instance (0 when empty).
inline int latest_slot(const std::vector<ScheduleInstance>& instances) {
  int h = 0;
  for (const auto& l : instances) h = std::max({h, l.offload.end, l.process.end, l.download.end});
  return h;
}

}  // namespace mecsched
