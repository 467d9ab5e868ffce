#pragma once

// Output formats: schedule JSON (read and write), run reports, the metrics
// CSV and per-machine Gantt charts as SVG.

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mecsched/error.hpp"
#include "mecsched/offline.hpp"
#include "mecsched/schedule.hpp"

namespace mecsched {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------- schedule JSON

inline nlohmann::json schedule_to_json(const Schedule& schedule, const Scenario& s, const std::string& algorithm) {
  using nlohmann::json;
  json list = json::array();
  for (const auto& l : schedule.selected) {
    list.push_back({{"job", s.jobs[l.job].id},
                    {"uplink_vap", s.uplink_aps[l.uplink_vap].id},
                    {"server", s.servers[l.server].id},
                    {"downlink_vap", s.downlink_aps[l.downlink_vap].id},
                    {"uplink_window", l.uplink_window},
                    {"downlink_window", l.downlink_window},
                    {"offload", {l.offload.start, l.offload.end}},
                    {"process", {l.process.start, l.process.end}},
                    {"download", {l.download.start, l.download.end}},
                    {"allocation", l.allocation},
                    {"energy", l.energy}});
  }
  return {{"algorithm", algorithm}, {"total_energy", schedule.total_energy}, {"instances", list}};
}

// Rebuilds a schedule against its scenario. Energies are recomputed from the
// model; structural mismatches throw ScenarioError.
inline Schedule schedule_from_json(const nlohmann::json& doc, const Scenario& s) {
  auto find_index = [](const auto& list, const std::string& id, const std::string& path) {
    for (std::size_t i = 0; i < list.size(); ++i)
      if (list[i].id == id) return i;
    throw ScenarioError(path, "unknown id '" + id + "'");
  };
  if (!doc.is_object() || !doc.contains("instances") || !doc["instances"].is_array())
    throw ScenarioError("$", "schedule must be an object with an 'instances' array");
  Schedule out;
  const auto& arr = doc["instances"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "instances[" + std::to_string(i) + "]";
    const auto& o = arr[i];
    try {
      ScheduleInstance l;
      l.job = find_index(s.jobs, o.at("job").get<std::string>(), path + ".job");
      l.uplink_vap = find_index(s.uplink_aps, o.at("uplink_vap").get<std::string>(), path + ".uplink_vap");
      l.server = find_index(s.servers, o.at("server").get<std::string>(), path + ".server");
      l.downlink_vap = find_index(s.downlink_aps, o.at("downlink_vap").get<std::string>(), path + ".downlink_vap");
      l.uplink_window = o.at("uplink_window").get<std::size_t>();
      l.downlink_window = o.at("downlink_window").get<std::size_t>();
      l.offload = {o.at("offload").at(0).get<int>(), o.at("offload").at(1).get<int>()};
      l.process = {o.at("process").at(0).get<int>(), o.at("process").at(1).get<int>()};
      l.download = {o.at("download").at(0).get<int>(), o.at("download").at(1).get<int>()};
      l.allocation = o.at("allocation").get<double>();
      const Job& job = s.jobs[l.job];
      if (l.uplink_window < job.windows.size() && l.downlink_window < job.windows.size() &&
          job.windows[l.uplink_window].direction == Direction::uplink &&
          job.windows[l.downlink_window].direction == Direction::downlink)
        l.energy = saved_energy(s, job, job.windows[l.uplink_window], job.windows[l.downlink_window]);
      else
        l.energy = o.at("energy").get<double>();
      out.add(l);
    } catch (const nlohmann::json::exception& e) {
      throw ScenarioError(path, e.what());
    }
  }
  return out;
}

inline Schedule load_schedule(const std::string& file, const Scenario& s) {
  std::ifstream in(file);
  if (!in) throw ScenarioError(file, "cannot open schedule file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(file, std::string("malformed JSON: ") + e.what());
  }
  return schedule_from_json(doc, s);
}

// --------------------------------------------------------------- reports

inline nlohmann::json lhjs_report_json(const LhjsReport& r, bool timing = true) {
  nlohmann::json j = {{"instances", r.instances},
                      {"light_instances", r.light_instances},
                      {"heavy_instances", r.heavy_instances},
                      {"lis_optimum", r.lis_optimum},
                      {"his_optimum", r.his_optimum},
                      {"light_energy", r.light_energy},
                      {"heavy_energy", r.heavy_energy},
                      {"branch", r.branch},
                      {"seed", r.seed},
                      {"kappa", r.kappa}};
  if (timing) {
    j["prepare_ms"] = r.prepare_ms;
    j["round_ms"] = r.round_ms;
  }
  return j;
}

// --------------------------------------------------------------------- CSV

struct MetricsRow {
  std::string scenario;
  std::string algorithm;
  double energy = 0.0;
  double lp_bound = 0.0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  double u_b = 0.0;
  double u_c = 0.0;

  double ratio() const { return lp_bound > 0.0 ? energy / lp_bound : 0.0; }
};

inline void write_metrics_header(std::ostream& out) {
  out << "# ratio = energy / lp_bound, where lp_bound is the optimum of the LP relaxation over all instances.\n"
         "# The relaxation bounds the integral optimum from above, so ratio is a lower bound on the true\n"
         "# fraction of the optimum achieved. runtime_ms is empty when timing is disabled.\n"
         "scenario,algorithm,energy,lp_bound,ratio,runtime_ms,seed,u_b,u_c\n";
}

inline void write_metrics_row(std::ostream& out, const MetricsRow& r, bool timing = true) {
  out << r.scenario << ',' << r.algorithm << ',' << format_number(r.energy) << ',' << format_number(r.lp_bound) << ','
      << format_number(r.ratio()) << ',' << (timing ? format_number(r.runtime_ms) : std::string()) << ',' << r.seed
      << ',' << format_number(r.u_b) << ',' << format_number(r.u_c) << '\n';
}

// ------------------------------------------------------------------- Gantt

inline void write_gantt_svg(std::ostream& out, const Schedule& schedule, const Scenario& s) {
  const MachineLayout layout = s.layout();
  const int horizon = std::max(1, s.time_grid.horizon);
  const double slot_px = std::max(4.0, std::min(24.0, 1200.0 / horizon));
  const double lane_h = 26.0, label_w = 90.0, top = 24.0;
  const double width = label_w + slot_px * horizon + 20.0;
  const double height = top + lane_h * static_cast<double>(layout.count()) + 30.0;
  const char* colors[] = {"#4e79a7", "#f28e2b", "#59a14f"};
  const char* names[] = {"offload", "process", "download"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(width) << "\" height=\""
      << format_number(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t m = 0; m < layout.count(); ++m) {
    const double y = top + lane_h * static_cast<double>(m);
    out << "<text x=\"4\" y=\"" << format_number(y + lane_h * 0.65) << "\">" << s.machine_name(m) << "</text>\n";
    out << "<line x1=\"" << label_w << "\" y1=\"" << format_number(y + lane_h) << "\" x2=\"" << format_number(width - 20)
        << "\" y2=\"" << format_number(y + lane_h) << "\" stroke=\"#ddd\"/>\n";
  }
  for (int t = 0; t <= horizon; t += std::max(1, horizon / 10)) {
    const double x = label_w + slot_px * t;
    out << "<text x=\"" << format_number(x) << "\" y=\"14\">" << t + 1 << "</text>\n";
  }
  // Server lanes stack concurrent jobs by allocation: each bar's height is its share.
  std::map<std::pair<std::size_t, int>, double> stacked;
  for (const auto& l : schedule.selected) {
    for (const auto& op : operations(l, layout)) {
      const std::size_t k = static_cast<std::size_t>(op.op);
      double base = 0.0;
      for (int t = op.interval.start; t <= op.interval.end; ++t) base = std::max(base, stacked[{op.machine, t}]);
      for (int t = op.interval.start; t <= op.interval.end; ++t) stacked[{op.machine, t}] = base + op.demand;
      const double h = (lane_h - 4.0) * op.demand;
      const double y = top + lane_h * static_cast<double>(op.machine) + 2.0 + (lane_h - 4.0) * std::min(base, 1.0 - op.demand);
      const double x = label_w + slot_px * (op.interval.start - 1);
      out << "<rect x=\"" << format_number(x) << "\" y=\"" << format_number(y) << "\" width=\""
          << format_number(slot_px * op.interval.length()) << "\" height=\"" << format_number(h) << "\" fill=\""
          << colors[k] << "\" stroke=\"black\" stroke-width=\"0.5\"><title>" << s.jobs[l.job].id << ' ' << names[k]
          << " [" << op.interval.start << ',' << op.interval.end << "] c=" << format_number(op.demand)
          << "</title></rect>\n";
    }
  }
  const double ly = height - 10.0;
  for (int k = 0; k < 3; ++k) {
    const double x = label_w + 110.0 * k;
    out << "<rect x=\"" << format_number(x) << "\" y=\"" << format_number(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << colors[k] << "\"/><text x=\"" << format_number(x + 14) << "\" y=\"" << format_number(ly) << "\">" << names[k]
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace mecsched
