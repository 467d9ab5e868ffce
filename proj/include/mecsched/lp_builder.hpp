#pragma once

// Packing LPs over schedule instances: the full relaxation of the offline ILP,
// its light-instance restriction (LIS) and the heavy-instance LP (HIS) whose
// server rows use unit coefficients.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "mecsched/instance.hpp"
#include "mecsched/simplex.hpp"

namespace mecsched {

enum class ServerRowCoefficients { allocation, unit };

namespace detail {

inline std::string machine_row_label(const MachineLayout& layout, std::size_t m, int t) {
  std::string tag;
  if (m < layout.uplinks) tag = "u" + std::to_string(m);
  else if (layout.is_server(m)) tag = "p" + std::to_string(m - layout.uplinks);
  else tag = "d" + std::to_string(m - layout.uplinks - layout.servers);
  return tag + "_t" + std::to_string(t);
}

inline LinearProgram build_packing_lp(const std::vector<ScheduleInstance>& instances, const MachineLayout& layout,
                                      ServerRowCoefficients server_coeff) {
  LinearProgram lp;
  lp.objective.reserve(instances.size());
  int horizon = 0;
  std::size_t jobs = 0;
  for (const auto& l : instances) {
    lp.objective.push_back(l.energy);
    horizon = std::max({horizon, l.offload.end, l.process.end, l.download.end});
    jobs = std::max(jobs, l.job + 1);
  }
  const std::size_t width = static_cast<std::size_t>(horizon) + 1;
  const std::size_t cells = layout.count() * width;

  // Pass 1: count occupants per (machine, slot); rows exist only where touched.
  std::vector<std::size_t> count(cells, 0);
  for (const auto& l : instances)
    for (const auto& op : operations(l, layout))
      for (int t = op.interval.start; t <= op.interval.end; ++t) ++count[op.machine * width + static_cast<std::size_t>(t)];

  std::vector<std::size_t> row_of(cells, 0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (count[cell] == 0) continue;
    row_of[cell] = lp.rows.size();
    LpRow row;
    row.terms.reserve(count[cell]);
    row.label = machine_row_label(layout, cell / width, static_cast<int>(cell % width));
    lp.rows.push_back(std::move(row));
  }
  // Pass 2: fill in ascending variable order.
  for (std::size_t v = 0; v < instances.size(); ++v) {
    for (const auto& op : operations(instances[v], layout)) {
      const double coeff = (op.op == Operation::process && server_coeff == ServerRowCoefficients::allocation)
                               ? op.demand
                               : 1.0;
      for (int t = op.interval.start; t <= op.interval.end; ++t)
        lp.rows[row_of[op.machine * width + static_cast<std::size_t>(t)]].terms.emplace_back(v, coeff);
    }
  }
  // One "at most one instance" row per job that has instances.
  std::vector<std::vector<std::size_t>> by_job(jobs);
  for (std::size_t v = 0; v < instances.size(); ++v) by_job[instances[v].job].push_back(v);
  for (std::size_t j = 0; j < jobs; ++j) {
    if (by_job[j].empty()) continue;
    LpRow row;
    row.label = "job" + std::to_string(j);
    for (std::size_t v : by_job[j]) row.terms.emplace_back(v, 1.0);
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

}  // namespace detail

inline LinearProgram build_full_relaxation(const std::vector<ScheduleInstance>& instances, const MachineLayout& layout) {
  return detail::build_packing_lp(instances, layout, ServerRowCoefficients::allocation);
}

// Caller passes the light instances; rows are the same as the full relaxation.
inline LinearProgram build_lis(const std::vector<ScheduleInstance>& light, const MachineLayout& layout) {
  return detail::build_packing_lp(light, layout, ServerRowCoefficients::allocation);
}

inline LinearProgram build_his(const std::vector<ScheduleInstance>& heavy, const MachineLayout& layout) {
  return detail::build_packing_lp(heavy, layout, ServerRowCoefficients::unit);
}

// CPLEX LP text format, readable by common external solvers.
inline void write_lp_text(std::ostream& out, const LinearProgram& lp, const std::string& name = "mecsched") {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "\\ " << name << "\nMaximize\n obj:";
  for (std::size_t j = 0; j < lp.objective.size(); ++j) {
    out << (j == 0 ? " " : " + ") << num(lp.objective[j]) << " x" << j;
    if (j % 8 == 7) out << "\n ";
  }
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const LpRow& row = lp.rows[i];
    out << ' ' << (row.label.empty() ? "r" + std::to_string(i) : row.label) << ':';
    for (std::size_t k = 0; k < row.terms.size(); ++k) {
      out << (k == 0 ? " " : " + ") << num(row.terms[k].second) << " x" << row.terms[k].first;
      if (k % 8 == 7) out << "\n  ";
    }
    out << " <= " << num(row.rhs) << '\n';
  }
  out << "End\n";
}

}  // namespace mecsched
