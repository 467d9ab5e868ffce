#pragma once

// Offline scheduling: randomized rounding of the light LP, the ordering and
// fractional local-ratio pass on the heavy LP, their best-of-two combination
// (LHJS), and the SortAll baseline.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mecsched/error.hpp"
#include "mecsched/instance.hpp"
#include "mecsched/lp_builder.hpp"
#include "mecsched/schedule.hpp"
#include "mecsched/simplex.hpp"

namespace mecsched {

inline constexpr double kDefaultKappa = 8.0;
inline constexpr double kOrderingLoadBound = 6.0;

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

// ---------------------------------------------------------------- RandRound

struct RandRoundOutcome {
  Schedule schedule;
  std::vector<std::size_t> selected_jobs;        // jobs chosen in step 1
  std::vector<std::size_t> candidates;           // positions in `light` chosen in step 2
  std::vector<OperationInterval> admitted;       // intervals admitted in step 3
};

inline RandRoundOutcome rand_round_traced(const std::vector<ScheduleInstance>& light, const FractionalSolution& y,
                                          double kappa, std::uint64_t seed, const MachineLayout& layout) {
  if (!(kappa >= 1.0)) throw ParameterError("kappa must be >= 1");
  if (y.values.size() != light.size()) throw ParameterError("fractional solution does not match the light instances");
  RandRoundOutcome out;
  std::mt19937_64 rng(seed);

  // Step 1: jobs in ascending order, each kept with probability y(L_j)/kappa.
  std::size_t jobs = 0;
  for (const auto& l : light) jobs = std::max(jobs, l.job + 1);
  const auto groups = group_by_job(light, jobs);
  std::vector<double> mass(jobs, 0.0);
  for (std::size_t j = 0; j < jobs; ++j)
    for (std::size_t i : groups[j]) mass[j] += y.values[i];
  for (std::size_t j = 0; j < jobs; ++j) {
    if (groups[j].empty()) continue;
    const double u = detail::uniform01(rng);
    if (mass[j] > 0.0 && u <= mass[j] / kappa) out.selected_jobs.push_back(j);
  }

  // Step 2: one instance per selected job by the prefix-sum rule.
  for (std::size_t j : out.selected_jobs) {
    const double v = 1.0 - detail::uniform01(rng);
    double prefix = 0.0;
    std::size_t pick = groups[j].front();
    for (std::size_t i : groups[j]) {
      if (y.values[i] <= 0.0) continue;
      pick = i;  // a rounding shortfall keeps the last positive instance
      prefix += y.values[i] / mass[j];
      if (v <= prefix) break;
    }
    out.candidates.push_back(pick);
  }

  // Step 3: per machine, admit intervals in start order against the load at their start.
  std::vector<std::vector<std::pair<std::size_t, OperationInterval>>> per_machine(layout.count());
  for (std::size_t k = 0; k < out.candidates.size(); ++k)
    for (const auto& op : operations(light[out.candidates[k]], layout)) per_machine[op.machine].emplace_back(k, op);
  std::vector<int> admitted_ops(out.candidates.size(), 0);
  for (auto& list : per_machine) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.second.interval.start < b.second.interval.start; });
    std::vector<OperationInterval> kept;
    for (const auto& [k, op] : list) {
      double active = 0.0;
      for (const auto& other : kept)
        if (other.interval.contains(op.interval.start)) active += other.demand;
      if (op.demand + active <= 1.0 + kCapacityTolerance) {
        kept.push_back(op);
        out.admitted.push_back(op);
        ++admitted_ops[k];
      }
    }
  }
  for (std::size_t k = 0; k < out.candidates.size(); ++k)
    if (admitted_ops[k] == 3) out.schedule.add(light[out.candidates[k]]);
  return out;
}

inline Schedule rand_round(const std::vector<ScheduleInstance>& light, const FractionalSolution& y, double kappa,
                           std::uint64_t seed, const MachineLayout& layout) {
  return rand_round_traced(light, y, kappa, seed, layout).schedule;
}

// True iff, at every slot, the demands of the given intervals on each machine sum to at most 1.
inline bool interval_admission_is_capacity_safe(const std::vector<OperationInterval>& admitted) {
  std::vector<std::pair<std::size_t, std::pair<int, double>>> events;  // machine, (slot, delta)
  for (const auto& op : admitted) {
    events.push_back({op.machine, {op.interval.start, op.demand}});
    events.push_back({op.machine, {op.interval.end + 1, -op.demand}});
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.first != b.second.first) return a.second.first < b.second.first;
    return a.second.second < b.second.second;  // releases before acquisitions at the same slot
  });
  double load = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0 && events[i].first != events[i - 1].first) load = 0.0;
    load += events[i].second.second;
    if (load > 1.0 + kCapacityTolerance) return false;
  }
  return true;
}

// ------------------------------------------------------------ Neighborhoods

// same_job[i]: other instances of the same job. conflicts[i]: instances of other
// jobs with an operation interval overlapping one of i's on the same machine.
struct NeighborIndex {
  std::vector<std::vector<std::size_t>> same_job;
  std::vector<std::vector<std::size_t>> conflicts;
};

inline NeighborIndex build_neighbor_index(const std::vector<ScheduleInstance>& instances, const MachineLayout& layout) {
  const std::size_t n = instances.size();
  NeighborIndex idx;
  idx.same_job.resize(n);
  idx.conflicts.resize(n);

  std::size_t jobs = 0;
  for (const auto& l : instances) jobs = std::max(jobs, l.job + 1);
  for (const auto& group : group_by_job(instances, jobs))
    for (std::size_t a : group)
      for (std::size_t b : group)
        if (a != b) idx.same_job[a].push_back(b);

  struct Item {
    Interval iv;
    std::size_t owner;
  };
  std::vector<std::vector<Item>> per_machine(layout.count());
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& op : operations(instances[i], layout)) per_machine[op.machine].push_back({op.interval, i});
  for (auto& items : per_machine) {
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return a.iv.start != b.iv.start ? a.iv.start < b.iv.start : a.owner < b.owner;
    });
    std::vector<Item> active;
    for (const Item& it : items) {
      std::erase_if(active, [&](const Item& a) { return a.iv.end < it.iv.start; });
      for (const Item& a : active) {
        if (instances[a.owner].job == instances[it.owner].job) continue;
        idx.conflicts[a.owner].push_back(it.owner);
        idx.conflicts[it.owner].push_back(a.owner);
      }
      active.push_back(it);
    }
  }
  for (auto& c : idx.conflicts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return idx;
}

// ------------------------------------------------------------------ FracLR

enum class AddBackRule { heavy_exclusive, capacity };

struct FracLrLayer {
  std::size_t chosen = 0;         // position in the ordered list
  std::vector<double> w;          // weights at entry (only live positions are meaningful)
  std::vector<double> w1;         // the decomposed part, w(chosen) on its neighborhood
  std::vector<char> live;         // positions still in the working set at entry
};

struct FracLrTrace {
  std::vector<FracLrLayer> layers;
  std::vector<std::size_t> added;  // positions added back during unwinding, in order
};

// Share of w(a) charged to a conflicting b. Under the capacity rule a pair that
// can run side by side (every common overlap fits within capacity) is charged
// b's demand; otherwise the full weight.
inline double conflict_share(const ScheduleInstance& a, const ScheduleInstance& b, const MachineLayout& layout,
                             AddBackRule rule) {
  if (rule == AddBackRule::heavy_exclusive) return 1.0;
  double share = 0.0;
  for (const auto& p : operations(a, layout))
    for (const auto& q : operations(b, layout)) {
      if (p.machine != q.machine || !p.interval.overlaps(q.interval)) continue;
      if (p.demand + q.demand > 1.0 + kCapacityTolerance) return 1.0;
      share = std::max(share, q.demand);
    }
  return share;
}

// Fractional local ratio over `ordered`, processed front to back; weights start at `w`.
inline Schedule frac_lr(const std::vector<ScheduleInstance>& ordered, std::vector<double> w, const MachineLayout& layout,
                        AddBackRule rule = AddBackRule::heavy_exclusive, FracLrTrace* trace = nullptr) {
  const std::size_t n = ordered.size();
  if (w.size() != n) throw ParameterError("weight vector does not match the ordered instances");
  const NeighborIndex nbr = build_neighbor_index(ordered, layout);

  std::vector<char> live(n, 1);
  std::vector<std::size_t> stack;
  std::size_t cursor = 0;
  while (true) {
    for (std::size_t i = cursor; i < n; ++i)
      if (live[i] && w[i] <= 0.0) live[i] = 0;
    while (cursor < n && !live[cursor]) ++cursor;
    if (cursor == n) break;
    const std::size_t l = cursor;
    const double wl = w[l];
    if (trace) {
      FracLrLayer layer;
      layer.chosen = l;
      layer.w = w;
      layer.live = live;
      layer.w1.assign(n, 0.0);
      layer.w1[l] = wl;
      for (std::size_t k : nbr.same_job[l]) layer.w1[k] = wl;
      for (std::size_t k : nbr.conflicts[l]) layer.w1[k] = wl * conflict_share(ordered[l], ordered[k], layout, rule);
      trace->layers.push_back(std::move(layer));
    }
    stack.push_back(l);
    w[l] -= wl;
    for (std::size_t k : nbr.same_job[l]) w[k] -= wl;
    for (std::size_t k : nbr.conflicts[l]) w[k] -= wl * conflict_share(ordered[l], ordered[k], layout, rule);
  }

  Schedule out;
  std::vector<char> taken(n, 0);
  std::vector<char> job_taken;
  for (const auto& l : ordered) job_taken.resize(std::max(job_taken.size(), l.job + 1), 0);
  CapacityLedger ledger(layout, latest_slot(ordered));
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
    const std::size_t l = *it;
    const ScheduleInstance& inst = ordered[l];
    if (job_taken[inst.job]) continue;
    bool ok = true;
    if (rule == AddBackRule::heavy_exclusive) {
      for (std::size_t k : nbr.conflicts[l])
        if (taken[k]) {
          ok = false;
          break;
        }
    } else {
      ok = ledger.fits(inst);
    }
    if (!ok) continue;
    taken[l] = 1;
    job_taken[inst.job] = 1;
    ledger.reserve(inst);
    out.add(inst);
    if (trace) trace->added.push_back(l);
  }
  out.normalize();
  return out;
}

// --------------------------------------------------------------- SortSched

struct OrderingOutcome {
  std::vector<std::size_t> order;   // positions in the input list
  std::vector<double> load_at_pick; // z-load of each pick against the remaining set
  std::size_t fallbacks = 0;        // picks whose load exceeded the bound
};

namespace detail {

// Repeatedly takes the first remaining support instance whose load
// z_l + sum of z over remaining conflicting instances is within the bound.
// With allow_fallback the minimum-load instance is taken when none qualifies.
inline OrderingOutcome order_by_local_load(const std::vector<ScheduleInstance>& instances,
                                           const FractionalSolution& z, const MachineLayout& layout,
                                           bool allow_fallback, std::vector<std::size_t>& support) {
  support.clear();
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (z.values[i] > 0.0) support.push_back(i);
  std::vector<ScheduleInstance> sub;
  sub.reserve(support.size());
  for (std::size_t i : support) sub.push_back(instances[i]);
  const NeighborIndex nbr = build_neighbor_index(sub, layout);

  const std::size_t k = support.size();
  std::vector<double> load(k);
  for (std::size_t a = 0; a < k; ++a) {
    load[a] = z.values[support[a]];
    for (std::size_t b : nbr.conflicts[a]) load[a] += z.values[support[b]];
  }
  std::vector<char> remaining(k, 1);
  OrderingOutcome out;
  const double bound = kOrderingLoadBound + 1e-9;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t pick = k;
    for (std::size_t a = 0; a < k; ++a)
      if (remaining[a] && load[a] <= bound) {
        pick = a;
        break;
      }
    if (pick == k) {
      if (!allow_fallback) throw InternalError("no instance satisfies the ordering load bound");
      for (std::size_t a = 0; a < k; ++a)
        if (remaining[a] && (pick == k || load[a] < load[pick])) pick = a;
      ++out.fallbacks;
    }
    out.order.push_back(pick);
    out.load_at_pick.push_back(load[pick]);
    remaining[pick] = 0;
    for (std::size_t b : nbr.conflicts[pick])
      if (remaining[b]) load[b] -= z.values[support[pick]];
  }
  for (auto& p : out.order) p = support[p];
  return out;
}

}  // namespace detail

struct SortSchedOutcome {
  Schedule schedule;
  OrderingOutcome ordering;
};

inline SortSchedOutcome sort_sched_traced(const std::vector<ScheduleInstance>& heavy, const FractionalSolution& z,
                                          const MachineLayout& layout) {
  if (z.values.size() != heavy.size()) throw ParameterError("fractional solution does not match the heavy instances");
  SortSchedOutcome out;
  std::vector<std::size_t> support;
  out.ordering = detail::order_by_local_load(heavy, z, layout, false, support);
  std::vector<ScheduleInstance> ordered;
  std::vector<double> w;
  for (std::size_t i : out.ordering.order) {
    ordered.push_back(heavy[i]);
    w.push_back(heavy[i].energy);
  }
  out.schedule = frac_lr(ordered, std::move(w), layout, AddBackRule::heavy_exclusive);
  return out;
}

inline Schedule sort_sched(const std::vector<ScheduleInstance>& heavy, const FractionalSolution& z,
                           const MachineLayout& layout) {
  return sort_sched_traced(heavy, z, layout).schedule;
}

// --------------------------------------------------------------------- LHJS

struct LhjsOptions {
  double kappa = kDefaultKappa;
  PivotRule rule = PivotRule::dantzig;
  EnumerationOptions enumeration;
  SimplexOptions simplex;
};

struct LhjsReport {
  std::size_t instances = 0;
  std::size_t light_instances = 0;
  std::size_t heavy_instances = 0;
  double lis_optimum = 0.0;
  double his_optimum = 0.0;
  double light_energy = 0.0;
  double heavy_energy = 0.0;
  std::string branch;  // "light" or "heavy"
  std::uint64_t seed = 0;
  double kappa = kDefaultKappa;
  double prepare_ms = 0.0;
  double round_ms = 0.0;
};

struct LhjsResult {
  Schedule schedule;
  LhjsReport report;
};

// Seed-independent part of LHJS: enumeration, both LPs and the heavy branch.
struct LhjsPlan {
  MachineLayout layout;
  std::vector<ScheduleInstance> light;
  std::vector<ScheduleInstance> heavy;
  FractionalSolution y;
  FractionalSolution z;
  Schedule heavy_schedule;
  double kappa = kDefaultKappa;
  double prepare_ms = 0.0;
};

inline LhjsPlan prepare_lhjs(const std::vector<ScheduleInstance>& instances, const MachineLayout& layout,
                             const LhjsOptions& opt = {}) {
  if (!(opt.kappa >= 1.0)) throw ParameterError("kappa must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  LhjsPlan plan;
  plan.layout = layout;
  plan.kappa = opt.kappa;
  auto split = split_light_heavy(instances);
  plan.light = std::move(split.light);
  plan.heavy = std::move(split.heavy);
  plan.y = solve(build_lis(plan.light, layout), opt.rule, opt.simplex);
  plan.z = solve(build_his(plan.heavy, layout), opt.rule, opt.simplex);
  plan.heavy_schedule = sort_sched(plan.heavy, plan.z, layout);
  plan.prepare_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return plan;
}

inline LhjsPlan prepare_lhjs(const Scenario& s, const LhjsOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  auto instances = enumerate_instances(s, opt.enumeration);
  const double enum_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  LhjsPlan plan = prepare_lhjs(instances, s.layout(), opt);
  plan.prepare_ms += enum_ms;
  return plan;
}

inline LhjsResult run_lhjs(const LhjsPlan& plan, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  LhjsResult out;
  Schedule light = rand_round(plan.light, plan.y, plan.kappa, seed, plan.layout);
  light.normalize();
  LhjsReport& r = out.report;
  r.instances = plan.light.size() + plan.heavy.size();
  r.light_instances = plan.light.size();
  r.heavy_instances = plan.heavy.size();
  r.lis_optimum = plan.y.objective;
  r.his_optimum = plan.z.objective;
  r.light_energy = light.total_energy;
  r.heavy_energy = plan.heavy_schedule.total_energy;
  r.seed = seed;
  r.kappa = plan.kappa;
  if (light.total_energy >= plan.heavy_schedule.total_energy) {
    r.branch = "light";
    out.schedule = std::move(light);
  } else {
    r.branch = "heavy";
    out.schedule = plan.heavy_schedule;
  }
  r.prepare_ms = plan.prepare_ms;
  r.round_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline LhjsResult lhjs(const Scenario& s, std::uint64_t seed, const LhjsOptions& opt = {}) {
  return run_lhjs(prepare_lhjs(s, opt), seed);
}

// ------------------------------------------------------------------ SortAll

struct SortAllResult {
  Schedule schedule;
  double lp_optimum = 0.0;
  std::size_t instances = 0;
  std::size_t ordering_fallbacks = 0;
};

inline SortAllResult sort_all(const std::vector<ScheduleInstance>& instances, const MachineLayout& layout,
                              PivotRule rule = PivotRule::dantzig, const SimplexOptions& simplex = {}) {
  SortAllResult out;
  out.instances = instances.size();
  const FractionalSolution x = solve(build_full_relaxation(instances, layout), rule, simplex);
  out.lp_optimum = x.objective;
  std::vector<std::size_t> support;
  const OrderingOutcome ord = detail::order_by_local_load(instances, x, layout, true, support);
  out.ordering_fallbacks = ord.fallbacks;
  std::vector<ScheduleInstance> ordered;
  std::vector<double> w;
  for (std::size_t i : ord.order) {
    ordered.push_back(instances[i]);
    w.push_back(instances[i].energy);
  }
  out.schedule = frac_lr(ordered, std::move(w), layout, AddBackRule::capacity);
  return out;
}

inline SortAllResult sort_all(const Scenario& s, const EnumerationOptions& enumeration = {},
                              PivotRule rule = PivotRule::dantzig, const SimplexOptions& simplex = {}) {
  return sort_all(enumerate_instances(s, enumeration), s.layout(), rule, simplex);
}

}  // namespace mecsched
