#pragma once

// Scenario JSON reader/writer. See docs/scenario-format.md for the schema.

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mecsched/model.hpp"

namespace mecsched {

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(path + "." + key, "missing field");
  return *it;
}

inline double get_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw ScenarioError(path + "." + key, "expected a number");
  return v.get<double>();
}

inline int get_int(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) throw ScenarioError(path + "." + key, "expected an integer");
  return v.get<int>();
}

inline std::string get_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ScenarioError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline std::string get_string_or(const json& obj, const char* key, const std::string& path,
                                 std::string fallback) {
  if (!obj.contains(key)) return fallback;
  return get_string(obj, key, path);
}

inline const json& get_array(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw ScenarioError(path + "." + key, "expected an array");
  return v;
}

inline std::string child(const std::string& path, const char* key, std::size_t i) {
  std::string p = path.empty() ? std::string(key) : path + "." + key;
  return p + "[" + std::to_string(i) + "]";
}

inline std::vector<AccessPoint> parse_aps(const json& doc, const char* key, Direction dir) {
  std::vector<AccessPoint> aps;
  const json& arr = get_array(doc, key, "");
  const char* rate_key = dir == Direction::uplink ? "uplink_rate" : "downlink_rate";
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = child("", key, i);
    const json& a = arr[i];
    AccessPoint ap;
    ap.id = get_string(a, "id", path);
    ap.direction = dir;
    ap.bandwidth_mhz = get_number(a, "bandwidth_mhz", path);
    ap.site = get_string_or(a, "site", path, "");
    const json& rings = get_array(a, "rings", path);
    for (std::size_t r = 0; r < rings.size(); ++r) {
      const std::string rp = child(path, "rings", r);
      Ring ring;
      ring.index = get_int(rings[r], "index", rp);
      if (rings[r].contains(rate_key)) ring.rate_mb_per_s = get_number(rings[r], rate_key, rp);
      if (rings[r].contains("shannon")) {
        const json& sh = rings[r]["shannon"];
        const std::string sp = rp + ".shannon";
        ring.shannon = ShannonParams{get_number(sh, "channel_gain", sp), get_number(sh, "noise_density", sp),
                                     get_number(sh, "tx_power", sp)};
      }
      if (!rings[r].contains(rate_key) && !ring.shannon)
        throw ScenarioError(rp, std::string("needs '") + rate_key + "' or 'shannon'");
      ap.rings.push_back(ring);
    }
    aps.push_back(std::move(ap));
  }
  return aps;
}

}  // namespace detail

// Parses and validates a scenario document. Throws ScenarioError with a path.
inline Scenario scenario_from_json(const nlohmann::json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw ScenarioError("$", "scenario must be a JSON object");
  Scenario s;
  const json& tg = require(doc, "time_grid", "");
  s.time_grid.slot_ms = get_number(tg, "slot_ms", "time_grid");
  s.uplink_aps = parse_aps(doc, "uplink_aps", Direction::uplink);
  s.downlink_aps = parse_aps(doc, "downlink_aps", Direction::downlink);

  const json& servers = get_array(doc, "servers", "");
  for (std::size_t i = 0; i < servers.size(); ++i) {
    const std::string path = child("", "servers", i);
    Server sv;
    sv.id = get_string(servers[i], "id", path);
    sv.resource_type = get_string_or(servers[i], "resource_type", path, "");
    sv.capacity_units = get_int(servers[i], "capacity_units", path);
    sv.site = get_string_or(servers[i], "site", path, "");
    const json& opts = get_array(servers[i], "options", path);
    for (std::size_t k = 0; k < opts.size(); ++k) {
      if (!opts[k].is_number()) throw ScenarioError(child(path, "options", k), "expected a number");
      sv.options.push_back(opts[k].get<double>());
    }
    s.servers.push_back(std::move(sv));
  }

  std::vector<BackhaulLink> links;
  const json& bh = get_array(doc, "backhaul", "");
  for (std::size_t i = 0; i < bh.size(); ++i) {
    const std::string path = child("", "backhaul", i);
    links.push_back({get_string(bh[i], "vap", path), get_string(bh[i], "server", path),
                     get_number(bh[i], "offset_ms", path), get_number(bh[i], "coeff_ms_per_mb", path)});
  }
  s.backhaul = Backhaul(std::move(links));

  const json& jobs = get_array(doc, "jobs", "");
  int max_deadline = 0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const std::string path = child("", "jobs", j);
    const json& o = jobs[j];
    Job job;
    job.id = get_string(o, "id", path);
    job.input_mb = get_number(o, "input_mb", path);
    job.output_mb = get_number(o, "output_mb", path);
    job.release = get_int(o, "release", path);
    job.deadline = get_int(o, "deadline", path);
    job.local_duration = get_int(o, "local_duration", path);
    job.local_power_w = get_number(o, "local_power_w", path);
    job.offload_power_w = get_number(o, "offload_power_w", path);
    job.download_power_w = get_number(o, "download_power_w", path);
    const json& caps = get_array(o, "capable_servers", path);
    for (std::size_t k = 0; k < caps.size(); ++k) {
      if (!caps[k].is_string()) throw ScenarioError(child(path, "capable_servers", k), "expected a string");
      job.capable_servers.push_back(caps[k].get<std::string>());
    }
    const json& wins = get_array(o, "windows", path);
    for (std::size_t k = 0; k < wins.size(); ++k) {
      const std::string wp = child(path, "windows", k);
      CoverageWindow w;
      w.vap_id = get_string(wins[k], "vap", wp);
      w.ring = get_int(wins[k], "ring", wp);
      w.start = get_int(wins[k], "start", wp);
      w.end = get_int(wins[k], "end", wp);
      job.windows.push_back(std::move(w));
    }
    const json& proc = get_array(o, "processing", path);
    for (std::size_t k = 0; k < proc.size(); ++k) {
      const std::string pp = child(path, "processing", k);
      job.processing.push_back(
          {get_string(proc[k], "server", pp), get_number(proc[k], "option", pp), get_int(proc[k], "slots", pp)});
    }
    max_deadline = std::max(max_deadline, job.deadline);
    s.jobs.push_back(std::move(job));
  }

  if (tg.contains("horizon")) s.time_grid.horizon = get_int(tg, "horizon", "time_grid");
  else s.time_grid.horizon = std::max(1, max_deadline);

  validate_scenario(s);
  return s;
}

inline Scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ScenarioError(file, "cannot open scenario file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(file, std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using nlohmann::json;
  json doc;
  doc["time_grid"] = {{"slot_ms", s.time_grid.slot_ms}, {"horizon", s.time_grid.horizon}};
  auto aps = [](const std::vector<AccessPoint>& list) {
    json arr = json::array();
    for (const auto& ap : list) {
      json rings = json::array();
      for (const auto& r : ap.rings) {
        json ring = {{"index", r.index}};
        ring[ap.direction == Direction::uplink ? "uplink_rate" : "downlink_rate"] = r.rate_mb_per_s;
        if (r.shannon)
          ring["shannon"] = {{"channel_gain", r.shannon->channel_gain},
                             {"noise_density", r.shannon->noise_density},
                             {"tx_power", r.shannon->tx_power}};
        rings.push_back(ring);
      }
      json a = {{"id", ap.id}, {"bandwidth_mhz", ap.bandwidth_mhz}, {"rings", rings}};
      if (!ap.site.empty()) a["site"] = ap.site;
      arr.push_back(a);
    }
    return arr;
  };
  doc["uplink_aps"] = aps(s.uplink_aps);
  doc["downlink_aps"] = aps(s.downlink_aps);
  json servers = json::array();
  for (const auto& sv : s.servers) {
    json o = {{"id", sv.id}, {"resource_type", sv.resource_type}, {"capacity_units", sv.capacity_units},
              {"options", sv.options}};
    if (!sv.site.empty()) o["site"] = sv.site;
    servers.push_back(o);
  }
  doc["servers"] = servers;
  json bh = json::array();
  for (const auto& l : s.backhaul.links())
    bh.push_back({{"vap", l.vap_id}, {"server", l.server_id}, {"offset_ms", l.offset_ms},
                  {"coeff_ms_per_mb", l.coeff_ms_per_mb}});
  doc["backhaul"] = bh;
  json jobs = json::array();
  for (const auto& j : s.jobs) {
    json wins = json::array();
    for (const auto& w : j.windows)
      wins.push_back({{"vap", w.vap_id}, {"ring", w.ring}, {"start", w.start}, {"end", w.end}});
    json proc = json::array();
    for (const auto& p : j.processing)
      proc.push_back({{"server", p.server_id}, {"option", p.option}, {"slots", p.slots}});
    jobs.push_back({{"id", j.id},
                    {"input_mb", j.input_mb},
                    {"output_mb", j.output_mb},
                    {"release", j.release},
                    {"deadline", j.deadline},
                    {"capable_servers", j.capable_servers},
                    {"windows", wins},
                    {"local_duration", j.local_duration},
                    {"local_power_w", j.local_power_w},
                    {"offload_power_w", j.offload_power_w},
                    {"download_power_w", j.download_power_w},
                    {"processing", proc}});
  }
  doc["jobs"] = jobs;
  return doc;
}

inline void save_scenario(const Scenario& s, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write '" + file + "'");
  out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace mecsched
