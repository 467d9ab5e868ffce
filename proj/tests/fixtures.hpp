#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mecsched/mecsched.hpp"

namespace fixtures {

using nlohmann::json;

// One uplink vAP, one downlink vAP and one server, all co-located, slot 1 ms.
// Rates are chosen so durations are exact: 0.66 MB up at 33 MB/s is 20 slots,
// 0.385 MB down at 77 MB/s is 5 slots.
inline json tiny_doc() {
  return json::parse(R"({
    "time_grid": {"slot_ms": 1},
    "uplink_aps": [{"id": "u0", "bandwidth_mhz": 40, "site": "a", "rings": [{"index": 1, "uplink_rate": 33}]}],
    "downlink_aps": [{"id": "d0", "bandwidth_mhz": 80, "site": "a", "rings": [{"index": 1, "downlink_rate": 77}]}],
    "servers": [{"id": "s0", "resource_type": "gpu", "capacity_units": 4, "options": [1.0], "site": "a"}],
    "backhaul": [],
    "jobs": [{
      "id": "j0", "input_mb": 0.66, "output_mb": 0.385, "release": 1, "deadline": 30,
      "capable_servers": ["s0"],
      "windows": [{"vap": "u0", "ring": 1, "start": 1, "end": 30}, {"vap": "d0", "ring": 1, "start": 1, "end": 30}],
      "local_duration": 30, "local_power_w": 5.33, "offload_power_w": 2.08, "download_power_w": 2.13,
      "processing": [{"server": "s0", "option": 1.0, "slots": 5}]
    }]
  })");
}

inline mecsched::Scenario tiny() { return mecsched::scenario_from_json(tiny_doc()); }

// Small job description used to assemble multi-job scenarios on the tiny topology.
inline json job(const std::string& id, int release, int deadline, double input_mb, double output_mb,
                const std::vector<std::pair<double, int>>& processing, int local_duration = 30,
                double local_power = 5.33) {
  json proc = json::array();
  for (auto [c, slots] : processing) proc.push_back({{"server", "s0"}, {"option", c}, {"slots", slots}});
  return {{"id", id},
          {"input_mb", input_mb},
          {"output_mb", output_mb},
          {"release", release},
          {"deadline", deadline},
          {"capable_servers", {"s0"}},
          {"windows", json::array({{{"vap", "u0"}, {"ring", 1}, {"start", release}, {"end", deadline}},
                                   {{"vap", "d0"}, {"ring", 1}, {"start", release}, {"end", deadline}}})},
          {"local_duration", local_duration},
          {"local_power_w", local_power},
          {"offload_power_w", 2.08},
          {"download_power_w", 2.13},
          {"processing", proc}};
}

inline mecsched::Scenario with_jobs(const std::vector<json>& jobs, const std::vector<double>& options = {1.0}) {
  json doc = tiny_doc();
  doc["servers"][0]["options"] = options;
  doc["jobs"] = jobs;
  doc["time_grid"].erase("horizon");
  return mecsched::scenario_from_json(doc);
}

// Generator settings for tiny scenarios: 10 ms slots over 300 ms, so at most 30 slots.
inline mecsched::GeneratorConfig tiny_config(std::uint64_t seed, std::size_t jobs) {
  mecsched::GeneratorConfig c;
  c.seed = seed;
  c.jobs = jobs;
  c.slot_ms = 10.0;
  c.window_ms = 300.0;
  c.uplink_aps = 2;
  c.servers = 2;
  c.downlink_aps = 2;
  c.options = {0.25, 0.5, 1.0};
  return c;
}

inline mecsched::ScheduleInstance make_instance(std::size_t job, mecsched::Interval up, mecsched::Interval proc,
                                                mecsched::Interval down, double c, double energy,
                                                std::size_t server = 0, std::size_t uv = 0, std::size_t dv = 0) {
  mecsched::ScheduleInstance l;
  l.job = job;
  l.uplink_vap = uv;
  l.server = server;
  l.downlink_vap = dv;
  l.offload = up;
  l.process = proc;
  l.download = down;
  l.allocation = c;
  l.energy = energy;
  return l;
}

}  // namespace fixtures
