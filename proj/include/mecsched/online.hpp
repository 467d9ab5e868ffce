#pragma once

// Online load-balanced scheduling (LBS) and its timing/allocation variants.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mecsched/error.hpp"
#include "mecsched/instance.hpp"
#include "mecsched/schedule.hpp"

namespace mecsched {

// Used fraction per machine and slot; vAP entries are 0 or 1.
class ResourceTimeline {
 public:
  ResourceTimeline(const MachineLayout& layout, int horizon)
      : layout_(layout), horizon_(std::max(horizon, 0)),
        beta_(layout.count(), std::vector<double>(static_cast<std::size_t>(horizon_) + 2, 0.0)) {}

  const MachineLayout& layout() const { return layout_; }
  int horizon() const { return horizon_; }
  double beta(std::size_t machine, int t) const {
    return (t < 0 || t > horizon_ + 1) ? 0.0 : beta_[machine][static_cast<std::size_t>(t)];
  }

  bool idle(std::size_t machine, int start, int length) const {
    if (start < 1 || start + length - 1 > horizon_) return false;
    for (int t = start; t < start + length; ++t)
      if (beta_[machine][static_cast<std::size_t>(t)] > kCapacityTolerance) return false;
    return true;
  }

  bool fits(std::size_t machine, int start, int length, double demand) const {
    if (start < 1 || start + length - 1 > horizon_) return false;
    for (int t = start; t < start + length; ++t)
      if (beta_[machine][static_cast<std::size_t>(t)] + demand > 1.0 + kCapacityTolerance) return false;
    return true;
  }

  double peak(std::size_t machine, int start, int length, double demand) const {
    double p = 0.0;
    for (int t = start; t < start + length; ++t) p = std::max(p, beta_[machine][static_cast<std::size_t>(t)] + demand);
    return p;
  }

  double sum(std::size_t machine, int from, int to) const {
    double s = 0.0;
    for (int t = from; t <= to; ++t) s += beta(machine, t);
    return s;
  }

  void commit(const ScheduleInstance& l) {
    for (const auto& op : operations(l, layout_))
      for (int t = op.interval.start; t <= op.interval.end; ++t)
        beta_[op.machine][static_cast<std::size_t>(t)] += op.demand;
  }

 private:
  MachineLayout layout_;
  int horizon_;
  std::vector<std::vector<double>> beta_;
};

struct WindowCandidate {
  std::size_t job = 0;
  std::size_t uplink_window = 0;
  std::size_t downlink_window = 0;
  double energy = 0.0;
};

enum class OperationTiming { earliest, latest };
enum class AllocationRule { smallest_feasible, largest_only };

struct OnlinePolicy {
  OperationTiming timing = OperationTiming::earliest;
  AllocationRule allocation = AllocationRule::smallest_feasible;

  static OnlinePolicy lbs() { return {}; }
  static OnlinePolicy lbs_late() { return {OperationTiming::latest, AllocationRule::smallest_feasible}; }
  static OnlinePolicy lc_early() { return {OperationTiming::earliest, AllocationRule::largest_only}; }
  static OnlinePolicy lc_late() { return {OperationTiming::latest, AllocationRule::largest_only}; }

  std::string name() const {
    if (allocation == AllocationRule::smallest_feasible) return timing == OperationTiming::earliest ? "lbs" : "lbs-late";
    return timing == OperationTiming::earliest ? "lc-early" : "lc-late";
  }

  static OnlinePolicy parse(const std::string& name) {
    if (name == "lbs") return lbs();
    if (name == "lbs-late") return lbs_late();
    if (name == "lc-early") return lc_early();
    if (name == "lc-late") return lc_late();
    throw ParameterError("unknown online policy '" + name + "' (expected lbs, lbs-late, lc-early, lc-late)");
  }

  friend bool operator==(const OnlinePolicy&, const OnlinePolicy&) = default;
};

inline const std::vector<OnlinePolicy>& all_online_policies() {
  static const std::vector<OnlinePolicy> p{OnlinePolicy::lbs(), OnlinePolicy::lbs_late(), OnlinePolicy::lc_early(),
                                           OnlinePolicy::lc_late()};
  return p;
}

namespace detail {

struct SlotRange {
  int lo = 1;
  int hi = 0;
  bool empty() const { return lo > hi; }
};

inline SlotRange uplink_start_range(const Scenario& s, const Job& job, const CoverageWindow& w) {
  return {std::max(job.release, w.start), w.end - offload_duration(s, job, w) + 1};
}

inline SlotRange downlink_start_range(const Scenario& s, const Job& job, const CoverageWindow& w) {
  return {w.start, std::min(w.end, job.deadline) - download_duration(s, job, w) + 1};
}

}  // namespace detail

// All (job, uplink window, downlink window) triples with positive energy whose
// offload and download fit their windows, highest energy first.
inline std::vector<WindowCandidate> generate_candidates(const Scenario& s, const std::vector<std::size_t>& arrivals) {
  std::vector<WindowCandidate> out;
  for (std::size_t j : arrivals) {
    const Job& job = s.jobs.at(j);
    for (std::size_t wu = 0; wu < job.windows.size(); ++wu) {
      const CoverageWindow& up = job.windows[wu];
      if (up.direction != Direction::uplink || detail::uplink_start_range(s, job, up).empty()) continue;
      for (std::size_t wd = 0; wd < job.windows.size(); ++wd) {
        const CoverageWindow& down = job.windows[wd];
        if (down.direction != Direction::downlink || detail::downlink_start_range(s, job, down).empty()) continue;
        const double e = saved_energy(s, job, up, down);
        if (e > 0.0) out.push_back({j, wu, wd, e});
      }
    }
  }
  std::sort(out.begin(), out.end(), [&](const WindowCandidate& a, const WindowCandidate& b) {
    if (a.energy != b.energy) return a.energy > b.energy;
    const Job& ja = s.jobs[a.job];
    const Job& jb = s.jobs[b.job];
    return std::tuple(a.job, ja.windows[a.uplink_window].start, ja.windows[a.downlink_window].start, a.uplink_window,
                      a.downlink_window) < std::tuple(b.job, jb.windows[b.uplink_window].start,
                                                      jb.windows[b.downlink_window].start, b.uplink_window,
                                                      b.downlink_window);
  });
  return out;
}

// Places one candidate against the timelines. Returns the instance to commit,
// or nothing when any stage fails. The timelines are not modified.
inline std::optional<ScheduleInstance> schedule_step(const Scenario& s, const WindowCandidate& cand,
                                                     const ResourceTimeline& tl, const OnlinePolicy& policy) {
  const Job& job = s.jobs.at(cand.job);
  const CoverageWindow& up = job.windows.at(cand.uplink_window);
  const CoverageWindow& down = job.windows.at(cand.downlink_window);
  const MachineLayout layout = s.layout();
  const std::size_t mu = layout.uplink(up.vap);
  const std::size_t md = layout.downlink(down.vap);
  const int du = offload_duration(s, job, up);
  const int dd = download_duration(s, job, down);
  const detail::SlotRange ur = detail::uplink_start_range(s, job, up);
  const detail::SlotRange dr = detail::downlink_start_range(s, job, down);

  std::optional<int> tu, td;
  for (int t = ur.lo; t <= ur.hi && !tu; ++t)
    if (tl.idle(mu, t, du)) tu = t;
  for (int t = dr.hi; t >= dr.lo && !td; --t)
    if (tl.idle(md, t, dd)) td = t;
  if (!tu || !td) return std::nullopt;

  struct Choice {
    double u;
    std::size_t server;
    std::size_t option;
    int dp, dup, dpd, te, tl;
  };
  std::optional<Choice> best;
  for (std::size_t p : job.capable) {
    const Server& sv = s.servers[p];
    const int dup = forward_duration(s, job.input_mb, up.vap_id, sv.id);
    const int dpd = forward_duration(s, job.output_mb, sv.id, down.vap_id);
    const int te = *tu + du + dup;
    const int tlast = *td - dpd - 1;
    if (tlast < te) continue;
    const std::size_t first = policy.allocation == AllocationRule::largest_only ? sv.options.size() - 1 : 0;
    const std::size_t ms = layout.server(p);
    for (std::size_t k = first; k < sv.options.size(); ++k) {
      const double c = sv.options[k];
      const int dp = job.processing_duration(p, k);
      bool feasible = false;
      for (int t = te; t + dp - 1 <= tlast && !feasible; ++t) feasible = tl.fits(ms, t, dp, c);
      if (!feasible) continue;
      const double u = (c * dp + tl.sum(ms, te, tlast)) / static_cast<double>(tlast - te + 1);
      if (!best || u < best->u) best = Choice{u, p, k, dp, dup, dpd, te, tlast};
      break;
    }
  }
  if (!best) return std::nullopt;

  const std::size_t ms = layout.server(best->server);
  const double c = s.servers[best->server].options[best->option];
  std::optional<int> tp;
  double tp_peak = std::numeric_limits<double>::infinity();
  for (int t = best->te; t + best->dp - 1 <= best->tl; ++t) {
    if (!tl.fits(ms, t, best->dp, c)) continue;
    const double pk = tl.peak(ms, t, best->dp, c);
    const bool better = pk < tp_peak - kCapacityTolerance ||
                        (policy.timing == OperationTiming::latest && pk <= tp_peak + kCapacityTolerance);
    if (!tp || better) {
      tp = t;
      tp_peak = std::min(tp_peak, pk);
    }
  }
  if (!tp) return std::nullopt;

  if (policy.timing == OperationTiming::earliest) {
    const int lo = std::max(dr.lo, *tp + best->dp + best->dpd);
    for (int t = lo; t <= *td; ++t)
      if (tl.idle(md, t, dd)) {
        td = t;
        break;
      }
  } else {
    const int hi = std::min(ur.hi, *tp - du - best->dup);
    for (int t = hi; t >= *tu; --t)
      if (tl.idle(mu, t, du)) {
        tu = t;
        break;
      }
  }

  ScheduleInstance l;
  l.job = cand.job;
  l.uplink_vap = up.vap;
  l.server = best->server;
  l.downlink_vap = down.vap;
  l.uplink_window = cand.uplink_window;
  l.downlink_window = cand.downlink_window;
  l.offload = {*tu, *tu + du - 1};
  l.process = {*tp, *tp + best->dp - 1};
  l.download = {*td, *td + dd - 1};
  l.allocation = c;
  l.energy = cand.energy;
  return l;
}

struct OnlineResult {
  Schedule schedule;
  std::size_t candidates = 0;
  std::size_t batches = 0;
  std::vector<std::size_t> unscheduled;  // job indices
};

// Processes jobs in batches of equal release slot, in slot order.
inline OnlineResult lbs(const Scenario& s, const OnlinePolicy& policy = {}) {
  OnlineResult out;
  ResourceTimeline tl(s.layout(), s.time_grid.horizon);
  std::vector<std::size_t> order(s.jobs.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.jobs[a].release < s.jobs[b].release; });
  std::vector<char> done(s.jobs.size(), 0);
  for (std::size_t i = 0; i < order.size();) {
    std::size_t k = i;
    std::vector<std::size_t> batch;
    while (k < order.size() && s.jobs[order[k]].release == s.jobs[order[i]].release) batch.push_back(order[k++]);
    i = k;
    ++out.batches;
    const auto cands = generate_candidates(s, batch);
    out.candidates += cands.size();
    for (const auto& c : cands) {
      if (done[c.job]) continue;
      if (auto l = schedule_step(s, c, tl, policy)) {
        tl.commit(*l);
        out.schedule.add(*l);
        done[c.job] = 1;
      }
    }
  }
  for (std::size_t j = 0; j < s.jobs.size(); ++j)
    if (!done[j]) out.unscheduled.push_back(j);
  out.schedule.normalize();
  return out;
}

}  // namespace mecsched
