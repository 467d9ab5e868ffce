#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace mecsched;
using fixtures::json;

namespace {

// Durations from an independent exact-rational oracle: bytes and rates scaled to integers.
long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

Scenario two_site_scenario(double offset, double coeff) {
  json doc = fixtures::tiny_doc();
  doc["servers"][0]["site"] = "b";
  doc["backhaul"] = json::array({{{"vap", "u0"}, {"server", "s0"}, {"offset_ms", offset}, {"coeff_ms_per_mb", coeff}},
                                 {{"vap", "s0"}, {"server", "d0"}, {"offset_ms", offset}, {"coeff_ms_per_mb", coeff}}});
  return scenario_from_json(doc);
}

}  // namespace

TEST(Durations, OffloadExamples) {
  EXPECT_EQ(transfer_slots(0.66, 33.0, 1.0), ceil_div(66'000, 3'300));  // 20
  EXPECT_EQ(transfer_slots(0.66, 33.0, 1.0), 20);
  EXPECT_EQ(transfer_slots(1.2, 23.0, 1.0), ceil_div(120'000, 2'300));  // 53
  EXPECT_EQ(transfer_slots(1e-6, 33.0, 1.0), 1);
}

TEST(Durations, DownloadExamples) {
  EXPECT_EQ(transfer_slots(0.38, 38.0, 1.0), 10);
  EXPECT_EQ(transfer_slots(0.001, 77.0, 1.0), 1);
  EXPECT_EQ(transfer_slots(0.77, 77.0, 1.0), 10);
}

TEST(Durations, ScenarioLevelAndDirectionChecks) {
  const Scenario s = fixtures::tiny();
  const Job& j = s.jobs[0];
  EXPECT_EQ(offload_duration(s, j, j.windows[0]), 20);
  EXPECT_EQ(download_duration(s, j, j.windows[1]), 5);
  EXPECT_THROW(offload_duration(s, j, j.windows[1]), InvalidWindow);
  EXPECT_THROW(download_duration(s, j, j.windows[0]), InvalidWindow);
}

TEST(Durations, RoundingDominatesExactTime) {
  for (double mb : {0.01, 0.137, 0.5, 0.999, 1.2})
    for (double rate : {23.0, 33.0, 46.5, 66.0})
      for (double slot : {1.0, 2.5, 5.0}) {
        const int d = transfer_slots(mb, rate, slot);
        EXPECT_GE(d * slot + 1e-9, mb / rate * 1000.0);
        EXPECT_LT((d - 1) * slot, mb / rate * 1000.0 + 1e-9);
      }
}

TEST(Forwarding, AffineLatencyAndSymmetry) {
  const Scenario s = two_site_scenario(1.0, 2.0);
  EXPECT_EQ(forward_duration(s, 1.2, "u0", "s0"), 4);  // ceil(1 + 2.4)
  EXPECT_EQ(forward_duration(s, 1.2, "s0", "u0"), 4);
  EXPECT_EQ(forward_duration(s, 0.0, "s0", "d0"), 1);
  Scenario bare = s;
  bare.backhaul = Backhaul(std::vector<BackhaulLink>{});
  EXPECT_THROW(forward_duration(bare, 1.0, "u0", "s0"), MissingBackhaulEntry);
}

TEST(Forwarding, CoLocatedIsZero) {
  const Scenario s = fixtures::tiny();
  EXPECT_EQ(forward_duration(s, 1000.0, "u0", "s0"), 0);
  EXPECT_EQ(forward_duration(s, 1000.0, "s0", "d0"), 0);
}

TEST(Energy, WorkedExample) {
  json doc = fixtures::tiny_doc();
  doc["jobs"][0]["local_duration"] = 40;
  doc["jobs"][0]["deadline"] = 40;
  doc["jobs"][0]["windows"][0]["end"] = 40;
  doc["jobs"][0]["windows"][1]["end"] = 40;
  doc["jobs"][0]["output_mb"] = 0.77;  // 10 slots at 77 MB/s
  const Scenario s = scenario_from_json(doc);
  const Job& j = s.jobs[0];
  EXPECT_NEAR(local_energy(s, j), 0.2132, 1e-12);
  EXPECT_NEAR(saved_energy(s, j, j.windows[0], j.windows[1]), 0.2132 - 0.0416 - 0.0213, 1e-12);
  EXPECT_NEAR(saved_energy(s, j, j.windows[0], j.windows[1]), 0.1503, 1e-12);
}

TEST(Energy, NonPositiveWhenTransfersCostMore) {
  json doc = fixtures::tiny_doc();
  doc["jobs"][0]["local_power_w"] = 0.5;
  const Scenario s = scenario_from_json(doc);
  const Job& j = s.jobs[0];
  EXPECT_LE(saved_energy(s, j, j.windows[0], j.windows[1]), 0.0);
}

TEST(Loader, HorizonDerivedFromDeadlines) {
  const Scenario s = fixtures::tiny();
  EXPECT_EQ(s.time_grid.horizon, 30);
  EXPECT_EQ(s.layout().count(), 3u);
}

TEST(Loader, ShannonRateDerived) {
  json doc = fixtures::tiny_doc();
  doc["uplink_aps"][0]["rings"][0] = {{"index", 1}, {"shannon", {{"channel_gain", 3.0}, {"noise_density", 1.0}, {"tx_power", 1.0}}}};
  const Scenario s = scenario_from_json(doc);
  EXPECT_NEAR(s.uplink_aps[0].rings[0].rate_mb_per_s, 40.0 * std::log2(4.0), 1e-9);
}

struct BadCase {
  const char* name;
  void (*mutate)(json&);
  const char* path;
};

class LoaderRejects : public ::testing::TestWithParam<BadCase> {};

TEST_P(LoaderRejects, WithPath) {
  json doc = fixtures::tiny_doc();
  GetParam().mutate(doc);
  try {
    scenario_from_json(doc);
    FAIL() << "accepted an invalid scenario";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find(GetParam().path), std::string::npos) << e.what();
  }
}

INSTANTIATE_TEST_SUITE_P(
    Invariants, LoaderRejects,
    ::testing::Values(
        BadCase{"zero_rate", [](json& d) { d["uplink_aps"][0]["rings"][0]["uplink_rate"] = 0; }, "uplink_aps[0].rings[0]"},
        BadCase{"ring_gap", [](json& d) { d["uplink_aps"][0]["rings"][0]["index"] = 2; }, "uplink_aps[0].rings[0]"},
        BadCase{"option_range", [](json& d) { d["servers"][0]["options"] = {0.0, 1.0}; }, "servers[0].options"},
        BadCase{"release_after_deadline", [](json& d) { d["jobs"][0]["release"] = 31; }, "jobs[0].deadline"},
        BadCase{"local_infeasible", [](json& d) { d["jobs"][0]["local_duration"] = 31; }, "jobs[0].local_duration"},
        BadCase{"unknown_vap", [](json& d) { d["jobs"][0]["windows"][0]["vap"] = "zz"; }, "jobs[0].windows[0].vap"},
        BadCase{"missing_processing", [](json& d) { d["servers"][0]["options"] = {0.5, 1.0}; }, "jobs[0].processing"},
        BadCase{"increasing_duration",
                [](json& d) {
                  d["servers"][0]["options"] = {0.5, 1.0};
                  d["jobs"][0]["processing"] = {{{"server", "s0"}, {"option", 0.5}, {"slots", 3}},
                                                {{"server", "s0"}, {"option", 1.0}, {"slots", 5}}};
                },
                "jobs[0].processing"},
        BadCase{"missing_backhaul", [](json& d) { d["servers"][0]["site"] = "b"; }, "jobs[0].windows[0].vap"},
        BadCase{"colocated_latency",
                [](json& d) {
                  d["backhaul"] = {{{"vap", "u0"}, {"server", "s0"}, {"offset_ms", 1.0}, {"coeff_ms_per_mb", 0.0}}};
                },
                "backhaul[0]"},
        BadCase{"negative_power", [](json& d) { d["jobs"][0]["offload_power_w"] = -1; }, "jobs[0].offload_power_w"},
        BadCase{"horizon_mismatch", [](json& d) { d["time_grid"]["horizon"] = 50; }, "time_grid.horizon"},
        BadCase{"missing_field", [](json& d) { d["jobs"][0].erase("input_mb"); }, "jobs[0].input_mb"}),
    [](const auto& info) { return std::string(info.param.name); });

TEST(Loader, RoundTripsThroughJson) {
  const Scenario a = fixtures::tiny();
  const Scenario b = scenario_from_json(scenario_to_json(a));
  EXPECT_EQ(scenario_to_json(a), scenario_to_json(b));
}

TEST(Loader, EmptyJobListIsValid) {
  json doc = fixtures::tiny_doc();
  doc["jobs"] = json::array();
  const Scenario s = scenario_from_json(doc);
  EXPECT_TRUE(s.jobs.empty());
}
