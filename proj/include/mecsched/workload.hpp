#pragma once

// Synthetic scenario generator and the utilization measures used to steer it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mecsched/error.hpp"
#include "mecsched/model.hpp"

namespace mecsched {

// ------------------------------------------------------------- utilization

struct JobUtilization {
  double value = 0.0;
  bool feasible = false;  // false: no mapping fits, value reported as 0
};

// Minimum over (capable server, option) of c * d / (D * d_max), where d_max is
// the widest processing span the server admits over the job's window pairs.
inline JobUtilization job_computation_utilization(const Scenario& s, std::size_t j) {
  const Job& job = s.jobs.at(j);
  const double servers = static_cast<double>(s.servers.size());
  JobUtilization out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p : job.capable) {
    int span_max = 0;
    for (const auto& up : job.windows) {
      if (up.direction != Direction::uplink) continue;
      const int du = offload_duration(s, job, up);
      const int tu = std::max(job.release, up.start);
      if (tu + du - 1 > up.end) continue;
      const int te = tu + du + forward_duration(s, job.input_mb, up.vap_id, s.servers[p].id);
      for (const auto& down : job.windows) {
        if (down.direction != Direction::downlink) continue;
        const int dd = download_duration(s, job, down);
        const int td = std::min(down.end, job.deadline) - dd + 1;
        if (td < down.start) continue;
        const int tl = td - forward_duration(s, job.output_mb, s.servers[p].id, down.vap_id) - 1;
        span_max = std::max(span_max, tl - te + 1);
      }
    }
    if (span_max <= 0) continue;
    const auto& options = s.servers[p].options;
    for (std::size_t k = 0; k < options.size(); ++k) {
      const int dp = job.processing_duration(p, k);
      if (dp > span_max) continue;
      best = std::min(best, options[k] * dp / (servers * span_max));
    }
  }
  if (std::isfinite(best)) out = {best, true};
  return out;
}

inline JobUtilization job_bandwidth_utilization(const Scenario& s, std::size_t j) {
  const Job& job = s.jobs.at(j);
  const double vaps = static_cast<double>(s.uplink_aps.size());
  int span_max = 0;
  for (const auto& w : job.windows)
    if (w.direction == Direction::uplink)
      span_max = std::max(span_max, std::min(w.end, job.deadline) - std::max(job.release, w.start) + 1);
  JobUtilization out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : job.windows) {
    if (w.direction != Direction::uplink) continue;
    const int span = std::min(w.end, job.deadline) - std::max(job.release, w.start) + 1;
    const int du = offload_duration(s, job, w);
    if (du > span) continue;
    best = std::min(best, du / (vaps * span_max));
  }
  if (std::isfinite(best)) out = {best, true};
  return out;
}

inline double jobset_computation_utilization(const Scenario& s) {
  double u = 0.0;
  for (std::size_t j = 0; j < s.jobs.size(); ++j) u += job_computation_utilization(s, j).value;
  return u;
}

inline double jobset_bandwidth_utilization(const Scenario& s) {
  double u = 0.0;
  for (std::size_t j = 0; j < s.jobs.size(); ++j) u += job_bandwidth_utilization(s, j).value;
  return u;
}

// --------------------------------------------------------------- generator

struct AppProfile {
  std::string name;
  std::string resource_type;  // "gpu" apps need a gpu server; "cpu" apps run anywhere
  double relative_deadline_ms = 100.0;
  double input_mb_min = 0.01, input_mb_max = 1.2;
  double output_mb_min = 0.001, output_mb_max = 0.05;
  double local_ms_min = 50.0, local_ms_max = 70.0;
  double local_power_min = 1.8, local_power_max = 5.33;
  double server_ms_min = 8.0, server_ms_max = 14.0;  // at full allocation
  double weight = 1.0;
};

inline std::vector<AppProfile> default_app_profiles() {
  return {
      {"resnet101", "gpu", 80.0, 0.01, 1.2, 0.001, 0.05, 50.0, 72.0, 1.8, 5.33, 8.0, 14.0, 1.0},
      {"resnet152", "gpu", 110.0, 0.01, 1.2, 0.001, 0.05, 70.0, 100.0, 1.8, 5.33, 12.0, 20.0, 1.0},
      {"vgg16", "gpu", 90.0, 0.01, 1.2, 0.001, 0.05, 60.0, 82.0, 1.8, 5.33, 10.0, 16.0, 1.0},
      {"surf3D", "cpu", 130.0, 0.14, 0.6, 0.05, 0.3, 80.0, 120.0, 0.97, 1.11, 15.0, 30.0, 1.0},
  };
}

struct UtilizationBand {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double v) const { return v >= lo && v <= hi; }
  double distance(double v) const { return v < lo ? lo - v : (v > hi ? v - hi : 0.0); }
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::size_t jobs = 20;
  double slot_ms = 5.0;
  double window_ms = 180.0;
  std::size_t uplink_aps = 2;
  std::size_t servers = 2;
  std::size_t downlink_aps = 2;
  int rings = 2;
  int max_windows = 2;  // per direction
  std::vector<double> options{0.25, 0.5, 0.75, 1.0};
  std::vector<std::string> server_types{"gpu", "cpu"};  // cycled over servers
  double parallel_exponent = 0.7;                       // d(c) = d(1) * c^-a
  double offload_power_w = 2.08;
  double download_power_w = 2.13;
  double hop_offset_ms = 1.0;
  double hop_coeff_ms_per_mb = 2.0;
  std::vector<AppProfile> apps = default_app_profiles();
  UtilizationBand bandwidth_band;
  UtilizationBand computation_band;
  std::size_t max_attempts = 200;
};

struct GeneratedScenario {
  Scenario scenario;
  double u_b = 0.0;
  double u_c = 0.0;
  std::uint64_t seed = 0;
  std::size_t attempts = 0;
  std::vector<std::string> warnings;  // jobs with no feasible mapping
};

namespace detail {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double real(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(unit() * (hi - lo + 1)); }
  std::size_t index(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(unit() * static_cast<double>(n))); }
  double round_to(double v, double step) { return std::round(v / step) * step; }

 private:
  std::mt19937_64 rng_;
};

inline std::uint64_t attempt_seed(std::uint64_t seed, std::size_t attempt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (attempt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline void check_config(const GeneratorConfig& c) {
  if (!(c.slot_ms > 0.0)) throw ParameterError("slot_ms must be positive");
  if (c.uplink_aps == 0 || c.servers == 0 || c.downlink_aps == 0) throw ParameterError("machine counts must be positive");
  if (c.rings < 1 || c.max_windows < 1) throw ParameterError("rings and max_windows must be at least 1");
  if (c.options.empty()) throw ParameterError("option set must be nonempty");
  for (double o : c.options)
    if (!(o > 0.0 && o <= 1.0)) throw ParameterError("options must lie in (0, 1]");
  if (c.apps.empty()) throw ParameterError("at least one application profile is required");
  if (c.server_types.empty()) throw ParameterError("server_types must be nonempty");
  for (const auto& a : c.apps)
    if (a.relative_deadline_ms > c.window_ms) throw ParameterError("window shorter than the deadline of " + a.name);
  if (c.bandwidth_band.lo > c.bandwidth_band.hi || c.computation_band.lo > c.computation_band.hi)
    throw ParameterError("empty utilization band");
}

inline double uplink_rate(double mhz, int ring) {
  const double base = mhz >= 80.0 ? 66.0 : 33.0;
  const double second = mhz >= 80.0 ? 46.5 : 23.0;
  if (ring == 1) return base;
  return second * std::pow(0.7, ring - 2);
}

inline double downlink_rate(double mhz) { return mhz >= 80.0 ? 77.0 : 38.0; }

inline Scenario sample_scenario(const GeneratorConfig& c, std::uint64_t seed) {
  Sampler rng(seed);
  Scenario s;
  s.time_grid.slot_ms = c.slot_ms;

  // Physical APs sit at positions 0..A-1 on a line; servers are spread over the same line.
  const std::size_t physical = std::max(c.uplink_aps, c.downlink_aps);
  std::vector<double> mhz(physical);
  for (auto& m : mhz) m = rng.unit() < 0.5 ? 40.0 : 80.0;
  auto site = [](std::size_t pos) { return "site" + std::to_string(pos); };
  for (std::size_t i = 0; i < c.uplink_aps; ++i) {
    AccessPoint ap{"up" + std::to_string(i), Direction::uplink, mhz[i], {}, site(i)};
    for (int r = 1; r <= c.rings; ++r) ap.rings.push_back({r, uplink_rate(mhz[i], r), std::nullopt});
    s.uplink_aps.push_back(std::move(ap));
  }
  for (std::size_t i = 0; i < c.downlink_aps; ++i) {
    AccessPoint ap{"down" + std::to_string(i), Direction::downlink, mhz[i], {}, site(i)};
    for (int r = 1; r <= c.rings; ++r) ap.rings.push_back({r, downlink_rate(mhz[i]), std::nullopt});
    s.downlink_aps.push_back(std::move(ap));
  }
  std::vector<std::size_t> server_pos(c.servers);
  std::vector<double> speed(c.servers);
  for (std::size_t p = 0; p < c.servers; ++p) {
    server_pos[p] = (p * physical) / c.servers;
    Server sv;
    sv.id = "srv" + std::to_string(p);
    sv.resource_type = c.server_types[p % c.server_types.size()];
    sv.capacity_units = 4;
    sv.options = c.options;
    sv.site = site(server_pos[p]);
    s.servers.push_back(std::move(sv));
    speed[p] = rng.real(0.8, 1.2);
  }
  std::vector<BackhaulLink> links;
  auto link = [&](const std::string& vap, std::size_t pos, std::size_t p) {
    const double hops = std::abs(static_cast<double>(pos) - static_cast<double>(server_pos[p]));
    links.push_back({vap, s.servers[p].id, c.hop_offset_ms * hops, c.hop_coeff_ms_per_mb * hops});
  };
  for (std::size_t p = 0; p < c.servers; ++p) {
    for (std::size_t i = 0; i < c.uplink_aps; ++i) link(s.uplink_aps[i].id, i, p);
    for (std::size_t i = 0; i < c.downlink_aps; ++i) link(s.downlink_aps[i].id, i, p);
  }
  s.backhaul = Backhaul(std::move(links));

  // Apps without any capable server are never drawn.
  std::vector<std::vector<std::size_t>> capable(c.apps.size());
  double total_weight = 0.0;
  for (std::size_t a = 0; a < c.apps.size(); ++a) {
    for (std::size_t p = 0; p < c.servers; ++p)
      if (c.apps[a].resource_type != "gpu" || s.servers[p].resource_type == "gpu") capable[a].push_back(p);
    if (!capable[a].empty()) total_weight += c.apps[a].weight;
  }
  if (c.jobs > 0 && !(total_weight > 0.0)) throw ParameterError("no application profile has a capable server");

  for (std::size_t j = 0; j < c.jobs; ++j) {
    std::size_t a = 0;
    double pick = rng.unit() * total_weight;
    for (std::size_t k = 0; k < c.apps.size(); ++k) {
      if (capable[k].empty()) continue;
      a = k;
      if (pick < c.apps[k].weight) break;
      pick -= c.apps[k].weight;
    }
    const AppProfile& app = c.apps[a];
    Job job;
    job.id = "j" + std::to_string(j);
    job.input_mb = rng.round_to(rng.real(app.input_mb_min, app.input_mb_max), 1e-4);
    job.output_mb = rng.round_to(rng.real(app.output_mb_min, app.output_mb_max), 1e-4);
    job.input_mb = std::max(job.input_mb, 1e-4);
    job.output_mb = std::max(job.output_mb, 1e-4);
    const double release_ms = rng.real(0.0, c.window_ms - app.relative_deadline_ms);
    job.release = static_cast<int>(std::floor(release_ms / c.slot_ms)) + 1;
    job.deadline = std::max(job.release, static_cast<int>(std::floor((release_ms + app.relative_deadline_ms) / c.slot_ms)));
    const int lifetime = job.deadline - job.release + 1;
    job.local_duration = std::clamp(static_cast<int>(ceil_tolerant(rng.real(app.local_ms_min, app.local_ms_max) / c.slot_ms)), 1,
                                    lifetime);
    job.local_power_w = rng.round_to(rng.real(app.local_power_min, app.local_power_max), 1e-3);
    job.offload_power_w = c.offload_power_w;
    job.download_power_w = c.download_power_w;
    const double base_ms = rng.real(app.server_ms_min, app.server_ms_max);
    for (std::size_t p : capable[a]) {
      job.capable_servers.push_back(s.servers[p].id);
      for (double opt : c.options) {
        const double ms = base_ms * speed[p] * std::pow(opt, -c.parallel_exponent);
        job.processing.push_back({s.servers[p].id, opt, std::max(1, static_cast<int>(ceil_tolerant(ms / c.slot_ms)))});
      }
    }
    // Coverage windows: the lifetime is cut into consecutive segments per direction,
    // each served by a random vAP ring and overlapping its neighbours by a few slots.
    for (Direction dir : {Direction::uplink, Direction::downlink}) {
      const int k = std::min(rng.integer(1, c.max_windows), lifetime);
      std::vector<int> cuts;
      for (int i = 0; i + 1 < k; ++i) cuts.push_back(rng.integer(job.release + 1, job.deadline));
      std::sort(cuts.begin(), cuts.end());
      int begin = job.release;
      for (int i = 0; i < k; ++i) {
        const int end = i + 1 < k ? cuts[static_cast<std::size_t>(i)] - 1 : job.deadline;
        CoverageWindow w;
        const std::size_t count = dir == Direction::uplink ? c.uplink_aps : c.downlink_aps;
        w.vap_id = (dir == Direction::uplink ? s.uplink_aps : s.downlink_aps)[rng.index(count)].id;
        w.ring = rng.integer(1, c.rings);
        w.start = std::max(1, begin - rng.integer(0, 2));
        w.end = std::min(job.deadline, std::max(end, w.start) + rng.integer(0, 2));
        job.windows.push_back(std::move(w));
        begin = end + 1;
        if (begin > job.deadline) break;
      }
    }
    s.jobs.push_back(std::move(job));
  }
  int horizon = 1;
  for (const auto& job : s.jobs) horizon = std::max(horizon, job.deadline);
  s.time_grid.horizon = horizon;
  validate_scenario(s);
  return s;
}

}  // namespace detail

// Rejection-samples scenarios until both utilizations fall inside their bands.
inline GeneratedScenario generate(const GeneratorConfig& config) {
  detail::check_config(config);
  double closest = std::numeric_limits<double>::infinity();
  double closest_ub = 0.0, closest_uc = 0.0;
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, config.max_attempts); ++attempt) {
    GeneratedScenario out;
    out.seed = attempt == 0 ? config.seed : detail::attempt_seed(config.seed, attempt);
    out.scenario = detail::sample_scenario(config, out.seed);
    out.attempts = attempt + 1;
    out.u_b = jobset_bandwidth_utilization(out.scenario);
    out.u_c = jobset_computation_utilization(out.scenario);
    if (config.bandwidth_band.contains(out.u_b) && config.computation_band.contains(out.u_c)) {
      for (std::size_t j = 0; j < out.scenario.jobs.size(); ++j)
        if (!job_computation_utilization(out.scenario, j).feasible || !job_bandwidth_utilization(out.scenario, j).feasible)
          out.warnings.push_back(out.scenario.jobs[j].id);
      return out;
    }
    const double d = config.bandwidth_band.distance(out.u_b) + config.computation_band.distance(out.u_c);
    if (d < closest) {
      closest = d;
      closest_ub = out.u_b;
      closest_uc = out.u_c;
    }
  }
  throw GenerationFailure("utilization band not reached after " + std::to_string(config.max_attempts) + " attempts",
                          closest_ub, closest_uc);
}

inline nlohmann::json metrics_json(const GeneratedScenario& g) {
  return {{"u_b", g.u_b},
          {"u_c", g.u_c},
          {"jobs", g.scenario.jobs.size()},
          {"seed", g.seed},
          {"attempts", g.attempts},
          {"horizon", g.scenario.time_grid.horizon},
          {"warnings", g.warnings}};
}

}  // namespace mecsched
