#pragma once

// Discrete-time MEC system model: access points split into uplink/downlink
// virtual APs, servers with fractional allocation options, an affine backhaul
// latency table, and deadline-constrained jobs with ring coverage windows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mecsched/error.hpp"

namespace mecsched {

// Slack used when comparing summed allocation fractions against capacity 1.
inline constexpr double kCapacityTolerance = 1e-9;

enum class Direction { uplink, downlink };

inline const char* to_string(Direction d) { return d == Direction::uplink ? "uplink" : "downlink"; }

struct TimeGrid {
  double slot_ms = 1.0;
  int horizon = 1;
};

struct ShannonParams {
  double channel_gain = 0.0;
  double noise_density = 0.0;
  double tx_power = 0.0;
};

struct Ring {
  int index = 1;
  double rate_mb_per_s = 0.0;
  std::optional<ShannonParams> shannon;
};

struct AccessPoint {
  std::string id;
  Direction direction = Direction::uplink;
  double bandwidth_mhz = 0.0;
  std::vector<Ring> rings;
  std::string site;  // machines sharing a non-empty site are co-located
};

struct Server {
  std::string id;
  std::string resource_type;
  int capacity_units = 1;
  std::vector<double> options;  // ascending after validation
  std::string site;
};

struct BackhaulLink {
  std::string vap_id;
  std::string server_id;
  double offset_ms = 0.0;
  double coeff_ms_per_mb = 0.0;
};

struct Scenario;
inline void validate_scenario(Scenario& s);

// Symmetric affine forwarding latency beta(theta) = offset + coeff * theta.
class Backhaul {
 public:
  Backhaul() = default;
  explicit Backhaul(std::vector<BackhaulLink> links) : links_(std::move(links)) {}

  const std::vector<BackhaulLink>& links() const { return links_; }

  // Latency in ms between two machines; nullopt when the pair is unknown.
  std::optional<double> latency_ms(std::string_view a, std::string_view b, double data_mb) const {
    if (a == b) return 0.0;
    auto sa = sites_.find(std::string(a));
    auto sb = sites_.find(std::string(b));
    if (sa != sites_.end() && sb != sites_.end() && !sa->second.empty() && sa->second == sb->second)
      return 0.0;
    auto it = index_.find(key(a, b));
    if (it == index_.end()) return std::nullopt;
    const BackhaulLink& l = links_[it->second];
    return l.offset_ms + l.coeff_ms_per_mb * data_mb;
  }

  bool colocated(std::string_view a, std::string_view b) const {
    auto sa = sites_.find(std::string(a));
    auto sb = sites_.find(std::string(b));
    return sa != sites_.end() && sb != sites_.end() && !sa->second.empty() &&
           sa->second == sb->second;
  }

 private:
  friend void validate_scenario(Scenario&);

  static std::pair<std::string, std::string> key(std::string_view a, std::string_view b) {
    return a < b ? std::pair{std::string(a), std::string(b)} : std::pair{std::string(b), std::string(a)};
  }

  std::vector<BackhaulLink> links_;
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
  std::map<std::string, std::string> sites_;
};

struct CoverageWindow {
  std::string vap_id;
  int ring = 1;
  int start = 1;
  int end = 1;

  // Filled by validate_scenario.
  Direction direction = Direction::uplink;
  std::size_t vap = 0;  // index into Scenario::uplink_aps or downlink_aps
};

struct ProcessingEntry {
  std::string server_id;
  double option = 1.0;
  int slots = 1;
};

struct Job {
  std::string id;
  double input_mb = 0.0;
  double output_mb = 0.0;
  int release = 1;
  int deadline = 1;
  std::vector<std::string> capable_servers;
  std::vector<CoverageWindow> windows;
  int local_duration = 1;
  double local_power_w = 0.0;
  double offload_power_w = 0.0;
  double download_power_w = 0.0;
  std::vector<ProcessingEntry> processing;

  // Filled by validate_scenario: capable server indices (ascending) and
  // processing slots indexed [server][option index]; 0 where not capable.
  std::vector<std::size_t> capable;
  std::vector<std::vector<int>> processing_slots;

  int processing_duration(std::size_t server, std::size_t option_index) const {
    return processing_slots.at(server).at(option_index);
  }
};

// Flat machine numbering: uplink vAPs, then servers, then downlink vAPs.
struct MachineLayout {
  std::size_t uplinks = 0;
  std::size_t servers = 0;
  std::size_t downlinks = 0;

  std::size_t uplink(std::size_t i) const { return i; }
  std::size_t server(std::size_t p) const { return uplinks + p; }
  std::size_t downlink(std::size_t d) const { return uplinks + servers + d; }
  std::size_t count() const { return uplinks + servers + downlinks; }
  bool is_server(std::size_t m) const { return m >= uplinks && m < uplinks + servers; }
};

struct Scenario {
  TimeGrid time_grid;
  std::vector<AccessPoint> uplink_aps;
  std::vector<AccessPoint> downlink_aps;
  std::vector<Server> servers;
  Backhaul backhaul;
  std::vector<Job> jobs;

  MachineLayout layout() const { return {uplink_aps.size(), servers.size(), downlink_aps.size()}; }

  const std::string& machine_name(std::size_t m) const {
    const MachineLayout l = layout();
    if (m < l.uplinks) return uplink_aps[m].id;
    if (m < l.uplinks + l.servers) return servers[m - l.uplinks].id;
    return downlink_aps.at(m - l.uplinks - l.servers).id;
  }

  const AccessPoint& vap_of(const CoverageWindow& w) const {
    return w.direction == Direction::uplink ? uplink_aps.at(w.vap) : downlink_aps.at(w.vap);
  }

  double window_rate(const CoverageWindow& w) const {
    return vap_of(w).rings.at(static_cast<std::size_t>(w.ring - 1)).rate_mb_per_s;
  }
};

// ceil() that ignores representation noise, so 0.66 MB / 33 MB/s is 20 ms, not 21.
inline long long ceil_tolerant(double x) {
  return static_cast<long long>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

inline int transfer_slots(double data_mb, double rate_mb_per_s, double slot_ms) {
  const long long s = ceil_tolerant(data_mb / rate_mb_per_s * 1000.0 / slot_ms);
  return static_cast<int>(std::max<long long>(1, s));
}

inline int offload_duration(const Scenario& s, const Job& job, const CoverageWindow& w) {
  if (w.direction != Direction::uplink)
    throw InvalidWindow("job '" + job.id + "': window on '" + w.vap_id + "' is not an uplink window");
  return transfer_slots(job.input_mb, s.window_rate(w), s.time_grid.slot_ms);
}

inline int download_duration(const Scenario& s, const Job& job, const CoverageWindow& w) {
  if (w.direction != Direction::downlink)
    throw InvalidWindow("job '" + job.id + "': window on '" + w.vap_id + "' is not a downlink window");
  return transfer_slots(job.output_mb, s.window_rate(w), s.time_grid.slot_ms);
}

// Backhaul forwarding time in slots; arguments may be given in either order.
inline int forward_duration(const Scenario& s, double data_mb, std::string_view a, std::string_view b) {
  const auto ms = s.backhaul.latency_ms(a, b, data_mb);
  if (!ms)
    throw MissingBackhaulEntry("no backhaul entry for ('" + std::string(a) + "', '" + std::string(b) + "')");
  return static_cast<int>(std::max<long long>(0, ceil_tolerant(*ms / s.time_grid.slot_ms)));
}

inline double slots_to_seconds(const Scenario& s, int slots) { return slots * s.time_grid.slot_ms / 1000.0; }

inline double local_energy(const Scenario& s, const Job& job) {
  return job.local_power_w * slots_to_seconds(s, job.local_duration);
}

// e_loc - e_up - e_down, each from slot-rounded durations. May be <= 0.
inline double saved_energy(const Scenario& s, const Job& job, const CoverageWindow& up,
                           const CoverageWindow& down) {
  const double e_up = job.offload_power_w * slots_to_seconds(s, offload_duration(s, job, up));
  const double e_down = job.download_power_w * slots_to_seconds(s, download_duration(s, job, down));
  return local_energy(s, job) - e_up - e_down;
}

namespace detail {

inline bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

inline void check_aps(std::vector<AccessPoint>& aps, Direction dir, const char* key,
                      std::set<std::string>& ids) {
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
    AccessPoint& ap = aps[i];
    if (ap.id.empty()) throw ScenarioError(path + ".id", "empty machine id");
    if (!ids.insert(ap.id).second) throw ScenarioError(path + ".id", "duplicate machine id '" + ap.id + "'");
    if (ap.direction != dir)
      throw ScenarioError(path + ".direction", std::string("expected ") + to_string(dir));
    if (!positive_finite(ap.bandwidth_mhz)) throw ScenarioError(path + ".bandwidth_mhz", "must be positive");
    if (ap.rings.empty()) throw ScenarioError(path + ".rings", "at least one ring required");
    for (std::size_t r = 0; r < ap.rings.size(); ++r) {
      const std::string rp = path + ".rings[" + std::to_string(r) + "]";
      Ring& ring = ap.rings[r];
      if (ring.index != static_cast<int>(r) + 1)
        throw ScenarioError(rp + ".index", "ring indices must be contiguous from 1");
      if (ring.shannon) {
        const ShannonParams& sp = *ring.shannon;
        if (!positive_finite(sp.channel_gain) || !positive_finite(sp.noise_density) ||
            !positive_finite(sp.tx_power))
          throw ScenarioError(rp + ".shannon", "parameters must be positive");
        const double derived = ap.bandwidth_mhz * std::log2(1.0 + sp.tx_power * sp.channel_gain / sp.noise_density);
        if (ring.rate_mb_per_s > 0.0 &&
            std::abs(ring.rate_mb_per_s - derived) > 1e-9 * std::max(1.0, derived))
          throw ScenarioError(rp + ".rate", "given rate disagrees with Shannon parameters");
        ring.rate_mb_per_s = derived;
      }
      if (!positive_finite(ring.rate_mb_per_s)) throw ScenarioError(rp + ".rate", "must be positive");
    }
  }
}

}  // namespace detail

// Checks every model invariant and fills the derived index fields.
// Throws ScenarioError naming the offending path.
inline void validate_scenario(Scenario& s) {
  using detail::positive_finite;
  if (!positive_finite(s.time_grid.slot_ms)) throw ScenarioError("time_grid.slot_ms", "must be positive");
  if (s.time_grid.horizon < 1) throw ScenarioError("time_grid.horizon", "must be >= 1");

  std::set<std::string> ids;
  detail::check_aps(s.uplink_aps, Direction::uplink, "uplink_aps", ids);
  detail::check_aps(s.downlink_aps, Direction::downlink, "downlink_aps", ids);

  std::map<std::string, std::size_t> up_index, down_index, server_index;
  for (std::size_t i = 0; i < s.uplink_aps.size(); ++i) up_index[s.uplink_aps[i].id] = i;
  for (std::size_t i = 0; i < s.downlink_aps.size(); ++i) down_index[s.downlink_aps[i].id] = i;

  for (std::size_t i = 0; i < s.servers.size(); ++i) {
    const std::string path = "servers[" + std::to_string(i) + "]";
    Server& sv = s.servers[i];
    if (sv.id.empty()) throw ScenarioError(path + ".id", "empty machine id");
    if (!ids.insert(sv.id).second) throw ScenarioError(path + ".id", "duplicate machine id '" + sv.id + "'");
    if (sv.capacity_units < 1) throw ScenarioError(path + ".capacity_units", "must be >= 1");
    if (sv.options.empty()) throw ScenarioError(path + ".options", "at least one allocation option required");
    for (std::size_t k = 0; k < sv.options.size(); ++k) {
      const double c = sv.options[k];
      if (!(std::isfinite(c) && c > 0.0 && c <= 1.0))
        throw ScenarioError(path + ".options[" + std::to_string(k) + "]", "option must lie in (0, 1]");
    }
    std::sort(sv.options.begin(), sv.options.end());
    if (std::adjacent_find(sv.options.begin(), sv.options.end()) != sv.options.end())
      throw ScenarioError(path + ".options", "duplicate allocation option");
    server_index[sv.id] = i;
  }

  // Backhaul: one endpoint a vAP, the other a server; co-located pairs stay at zero.
  Backhaul& bh = s.backhaul;
  bh.index_.clear();
  bh.sites_.clear();
  for (const auto& ap : s.uplink_aps) bh.sites_[ap.id] = ap.site;
  for (const auto& ap : s.downlink_aps) bh.sites_[ap.id] = ap.site;
  for (const auto& sv : s.servers) bh.sites_[sv.id] = sv.site;
  for (std::size_t i = 0; i < bh.links_.size(); ++i) {
    const std::string path = "backhaul[" + std::to_string(i) + "]";
    BackhaulLink& l = bh.links_[i];
    const bool vap_first = up_index.count(l.vap_id) || down_index.count(l.vap_id);
    const bool server_first = server_index.count(l.vap_id) > 0;
    const bool vap_second = up_index.count(l.server_id) || down_index.count(l.server_id);
    const bool server_second = server_index.count(l.server_id) > 0;
    if (server_first && vap_second) std::swap(l.vap_id, l.server_id);
    else if (!(vap_first && server_second))
      throw ScenarioError(path, "entry must connect a vAP and a server");
    if (!(std::isfinite(l.offset_ms) && l.offset_ms >= 0.0)) throw ScenarioError(path + ".offset_ms", "must be >= 0");
    if (!(std::isfinite(l.coeff_ms_per_mb) && l.coeff_ms_per_mb >= 0.0))
      throw ScenarioError(path + ".coeff_ms_per_mb", "must be >= 0");
    if (bh.colocated(l.vap_id, l.server_id) && (l.offset_ms != 0.0 || l.coeff_ms_per_mb != 0.0))
      throw ScenarioError(path, "co-located pair must have zero latency");
    if (!bh.index_.emplace(Backhaul::key(l.vap_id, l.server_id), i).second)
      throw ScenarioError(path, "duplicate entry for ('" + l.vap_id + "', '" + l.server_id + "')");
  }

  std::set<std::string> job_ids;
  int max_deadline = 0;
  for (std::size_t j = 0; j < s.jobs.size(); ++j) {
    const std::string path = "jobs[" + std::to_string(j) + "]";
    Job& job = s.jobs[j];
    if (job.id.empty()) throw ScenarioError(path + ".id", "empty job id");
    if (!job_ids.insert(job.id).second) throw ScenarioError(path + ".id", "duplicate job id '" + job.id + "'");
    if (!positive_finite(job.input_mb)) throw ScenarioError(path + ".input_mb", "must be positive");
    if (!positive_finite(job.output_mb)) throw ScenarioError(path + ".output_mb", "must be positive");
    if (!positive_finite(job.local_power_w)) throw ScenarioError(path + ".local_power_w", "must be positive");
    if (!positive_finite(job.offload_power_w)) throw ScenarioError(path + ".offload_power_w", "must be positive");
    if (!positive_finite(job.download_power_w)) throw ScenarioError(path + ".download_power_w", "must be positive");
    if (job.release < 1) throw ScenarioError(path + ".release", "must be >= 1");
    if (job.deadline < job.release) throw ScenarioError(path + ".deadline", "must be >= release");
    if (job.deadline > s.time_grid.horizon) throw ScenarioError(path + ".deadline", "exceeds horizon");
    if (job.local_duration < 1) throw ScenarioError(path + ".local_duration", "must be >= 1");
    if (job.release + job.local_duration - 1 > job.deadline)
      throw ScenarioError(path + ".local_duration", "local processing cannot meet the deadline");
    max_deadline = std::max(max_deadline, job.deadline);

    job.capable.clear();
    for (std::size_t k = 0; k < job.capable_servers.size(); ++k) {
      auto it = server_index.find(job.capable_servers[k]);
      if (it == server_index.end())
        throw ScenarioError(path + ".capable_servers[" + std::to_string(k) + "]",
                            "unknown server '" + job.capable_servers[k] + "'");
      job.capable.push_back(it->second);
    }
    std::sort(job.capable.begin(), job.capable.end());
    if (std::adjacent_find(job.capable.begin(), job.capable.end()) != job.capable.end())
      throw ScenarioError(path + ".capable_servers", "duplicate server");

    for (std::size_t w = 0; w < job.windows.size(); ++w) {
      const std::string wp = path + ".windows[" + std::to_string(w) + "]";
      CoverageWindow& win = job.windows[w];
      const AccessPoint* ap = nullptr;
      if (auto it = up_index.find(win.vap_id); it != up_index.end()) {
        win.direction = Direction::uplink;
        win.vap = it->second;
        ap = &s.uplink_aps[it->second];
      } else if (auto it2 = down_index.find(win.vap_id); it2 != down_index.end()) {
        win.direction = Direction::downlink;
        win.vap = it2->second;
        ap = &s.downlink_aps[it2->second];
      } else {
        throw ScenarioError(wp + ".vap", "unknown vAP '" + win.vap_id + "'");
      }
      if (win.ring < 1 || win.ring > static_cast<int>(ap->rings.size()))
        throw ScenarioError(wp + ".ring", "ring index out of range");
      if (win.start < 1) throw ScenarioError(wp + ".start", "must be >= 1");
      if (win.end < win.start) throw ScenarioError(wp + ".end", "must be >= start");
      if (win.end > s.time_grid.horizon) throw ScenarioError(wp + ".end", "exceeds horizon");
      for (std::size_t p : job.capable) {
        if (!bh.latency_ms(win.vap_id, s.servers[p].id, 0.0))
          throw ScenarioError(wp + ".vap", "no backhaul entry between '" + win.vap_id + "' and '" +
                                               s.servers[p].id + "'");
      }
    }

    job.processing_slots.assign(s.servers.size(), {});
    for (std::size_t p : job.capable) job.processing_slots[p].assign(s.servers[p].options.size(), 0);
    for (std::size_t k = 0; k < job.processing.size(); ++k) {
      const std::string pp = path + ".processing[" + std::to_string(k) + "]";
      const ProcessingEntry& e = job.processing[k];
      auto it = server_index.find(e.server_id);
      if (it == server_index.end() || !std::binary_search(job.capable.begin(), job.capable.end(), it->second))
        throw ScenarioError(pp + ".server", "'" + e.server_id + "' is not a capable server");
      const auto& opts = s.servers[it->second].options;
      auto oit = std::find(opts.begin(), opts.end(), e.option);
      if (oit == opts.end()) throw ScenarioError(pp + ".option", "not an option of '" + e.server_id + "'");
      if (e.slots < 1) throw ScenarioError(pp + ".slots", "must be >= 1");
      int& cell = job.processing_slots[it->second][static_cast<std::size_t>(oit - opts.begin())];
      if (cell != 0) throw ScenarioError(pp, "duplicate processing entry");
      cell = e.slots;
    }
    for (std::size_t p : job.capable) {
      const auto& row = job.processing_slots[p];
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] == 0)
          throw ScenarioError(path + ".processing", "missing duration for ('" + s.servers[p].id + "', " +
                                                        std::to_string(s.servers[p].options[k]) + ")");
        if (k > 0 && row[k] > row[k - 1])
          throw ScenarioError(path + ".processing",
                              "duration increases with allocation on '" + s.servers[p].id + "'");
      }
    }
  }
  if (!s.jobs.empty() && s.time_grid.horizon != max_deadline)
    throw ScenarioError("time_grid.horizon", "must equal the latest job deadline (" + std::to_string(max_deadline) + ")");
}

}  // namespace mecsched
