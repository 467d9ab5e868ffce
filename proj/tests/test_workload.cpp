#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"

using namespace mecsched;
using fixtures::json;

namespace {

// Slot-scanning oracle for the per-job computation utilization.
double brute_computation(const Scenario& s, std::size_t j) {
  const Job& job = s.jobs[j];
  const int h = s.time_grid.horizon;
  double best = -1.0;
  for (std::size_t p = 0; p < s.servers.size(); ++p) {
    if (std::find(job.capable.begin(), job.capable.end(), p) == job.capable.end()) continue;
    int span_max = 0;
    for (const auto& up : job.windows) {
      if (up.direction != Direction::uplink) continue;
      const int du = offload_duration(s, job, up);
      int first_tu = 0;
      for (int t = 1; t <= h && !first_tu; ++t)
        if (t >= job.release && t >= up.start && t + du - 1 <= up.end) first_tu = t;
      if (!first_tu) continue;
      for (const auto& down : job.windows) {
        if (down.direction != Direction::downlink) continue;
        const int dd = download_duration(s, job, down);
        int last_td = 0;
        for (int t = h; t >= 1 && !last_td; --t)
          if (t >= down.start && t + dd - 1 <= down.end && t + dd - 1 <= job.deadline) last_td = t;
        if (!last_td) continue;
        const int te = first_tu + du + forward_duration(s, job.input_mb, up.vap_id, s.servers[p].id);
        const int tl = last_td - forward_duration(s, job.output_mb, s.servers[p].id, down.vap_id) - 1;
        span_max = std::max(span_max, tl - te + 1);
      }
    }
    for (std::size_t k = 0; k < s.servers[p].options.size(); ++k) {
      const int dp = job.processing_duration(p, k);
      if (span_max <= 0 || dp > span_max) continue;
      const double v = s.servers[p].options[k] * dp / (static_cast<double>(s.servers.size()) * span_max);
      if (best < 0 || v < best) best = v;
    }
  }
  return best < 0 ? 0.0 : best;
}

double brute_bandwidth(const Scenario& s, std::size_t j) {
  const Job& job = s.jobs[j];
  int span_max = 0;
  std::vector<std::pair<int, int>> fits;
  for (const auto& w : job.windows) {
    if (w.direction != Direction::uplink) continue;
    int span = 0;
    for (int t = 1; t <= s.time_grid.horizon; ++t) span += t >= job.release && t >= w.start && t <= w.end && t <= job.deadline;
    span_max = std::max(span_max, span);
    fits.emplace_back(offload_duration(s, job, w), span);
  }
  double best = -1.0;
  for (auto [du, span] : fits) {
    if (du > span) continue;
    const double v = du / (static_cast<double>(s.uplink_aps.size()) * span_max);
    if (best < 0 || v < best) best = v;
  }
  return best < 0 ? 0.0 : best;
}

}  // namespace

TEST(Utilization, TinyChain) {
  const Scenario s = fixtures::tiny();
  // Processing span [21, 25] holds exactly dp = 5 slots.
  EXPECT_DOUBLE_EQ(job_computation_utilization(s, 0).value, 1.0);
  EXPECT_DOUBLE_EQ(job_bandwidth_utilization(s, 0).value, 20.0 / 30.0);
  EXPECT_TRUE(job_computation_utilization(s, 0).feasible);
}

TEST(Utilization, WiderChain) {
  json doc = fixtures::tiny_doc();
  doc["jobs"][0]["deadline"] = 40;
  doc["jobs"][0]["windows"][0]["end"] = 40;
  doc["jobs"][0]["windows"][1]["end"] = 40;
  doc["time_grid"].erase("horizon");
  const Scenario s = scenario_from_json(doc);
  EXPECT_DOUBLE_EQ(job_computation_utilization(s, 0).value, 5.0 / 15.0);
  EXPECT_DOUBLE_EQ(job_bandwidth_utilization(s, 0).value, 0.5);
  EXPECT_DOUBLE_EQ(jobset_computation_utilization(s), 5.0 / 15.0);
}

TEST(Utilization, InfeasibleJobContributesZero) {
  json doc = fixtures::tiny_doc();
  doc["jobs"][0]["processing"][0]["slots"] = 6;  // span is 5
  const Scenario s = scenario_from_json(doc);
  EXPECT_FALSE(job_computation_utilization(s, 0).feasible);
  EXPECT_EQ(job_computation_utilization(s, 0).value, 0.0);
}

TEST(Utilization, MatchesSlotScanningOracle) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorConfig cfg = fixtures::tiny_config(seed, 6);
    cfg.options = {0.5, 1.0};
    cfg.max_windows = 3;
    cfg.rings = 3;
    const Scenario s = generate(cfg).scenario;
    for (std::size_t j = 0; j < s.jobs.size(); ++j) {
      EXPECT_NEAR(job_computation_utilization(s, j).value, brute_computation(s, j), 1e-15) << seed << "/" << j;
      EXPECT_NEAR(job_bandwidth_utilization(s, j).value, brute_bandwidth(s, j), 1e-15) << seed << "/" << j;
    }
  }
}

TEST(Generator, ZeroJobs) {
  GeneratorConfig cfg = fixtures::tiny_config(1, 0);
  const auto g = generate(cfg);
  EXPECT_TRUE(g.scenario.jobs.empty());
  EXPECT_EQ(g.u_b, 0.0);
  EXPECT_EQ(g.u_c, 0.0);
}

TEST(Generator, OpenBandAcceptsFirstDraw) {
  GeneratorConfig cfg = fixtures::tiny_config(77, 5);
  const auto g = generate(cfg);
  EXPECT_EQ(g.attempts, 1u);
  EXPECT_EQ(g.seed, 77u);
}

TEST(Generator, Deterministic) {
  GeneratorConfig cfg;
  cfg.seed = 2024;
  cfg.computation_band = {1.2, 1.6};
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  EXPECT_EQ(scenario_to_json(a.scenario), scenario_to_json(b.scenario));
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.attempts, b.attempts);
  EXPECT_TRUE(cfg.computation_band.contains(a.u_c));
}

TEST(Generator, UnreachableBandFails) {
  GeneratorConfig cfg = fixtures::tiny_config(5, 3);
  cfg.computation_band = {100.0, 200.0};
  cfg.max_attempts = 4;
  try {
    generate(cfg);
    FAIL() << "expected GenerationFailure";
  } catch (const GenerationFailure& e) {
    EXPECT_GT(e.closest_uc(), 0.0);
    EXPECT_LT(e.closest_uc(), 100.0);
  }
}

TEST(Generator, RejectsBadConfig) {
  GeneratorConfig cfg;
  cfg.servers = 0;
  EXPECT_THROW(generate(cfg), ParameterError);
  cfg = {};
  cfg.options = {0.0};
  EXPECT_THROW(generate(cfg), ParameterError);
  cfg = {};
  cfg.window_ms = 50.0;
  EXPECT_THROW(generate(cfg), ParameterError);
}

TEST(Generator, ProfilesAndStructure) {
  GeneratorConfig cfg;
  cfg.seed = 8;
  cfg.jobs = 60;
  cfg.window_ms = 400.0;
  cfg.rings = 3;
  cfg.max_windows = 3;
  const Scenario s = generate(cfg).scenario;
  const std::set<int> lifetimes{16, 22, 18, 26};
  for (const auto& job : s.jobs) {
    const int life = job.deadline - job.release + 1;
    EXPECT_TRUE(lifetimes.count(life)) << job.id << " lifetime " << life;
    EXPECT_GE(job.release, 1);
    EXPECT_LE(job.deadline, static_cast<int>(cfg.window_ms / cfg.slot_ms));
    const bool gpu_app = life != 26;
    for (std::size_t p : job.capable) {
      if (gpu_app) {
        EXPECT_EQ(s.servers[p].resource_type, "gpu");
      }
      for (std::size_t k = 1; k < s.servers[p].options.size(); ++k)
        EXPECT_LE(job.processing_duration(p, k), job.processing_duration(p, k - 1));
    }
    if (!gpu_app) {
      EXPECT_EQ(job.capable.size(), s.servers.size());
    }
    int ups = 0, downs = 0;
    for (const auto& w : job.windows) {
      (w.direction == Direction::uplink ? ups : downs) += 1;
      EXPECT_GE(w.start, std::max(1, job.release - 2));
      EXPECT_LE(w.end, job.deadline);
      EXPECT_LE(w.start, w.end);
    }
    EXPECT_GE(ups, 1);
    EXPECT_GE(downs, 1);
    EXPECT_LE(ups, cfg.max_windows);
    EXPECT_LE(downs, cfg.max_windows);
  }
}

TEST(Generator, MetricsJson) {
  const auto g = generate(fixtures::tiny_config(3, 4));
  const json m = metrics_json(g);
  EXPECT_EQ(m["jobs"], 4);
  EXPECT_DOUBLE_EQ(m["u_c"].get<double>(), g.u_c);
  EXPECT_EQ(m["horizon"], g.scenario.time_grid.horizon);
}
