#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace mecsched;
using fixtures::json;
using fixtures::make_instance;

namespace {

bool has(const ValidationReport& r, const std::string& id) {
  for (const auto& v : r.violations)
    if (v.constraint == id) return true;
  return false;
}

Schedule of(std::initializer_list<ScheduleInstance> list) {
  Schedule s;
  for (const auto& l : list) s.add(l);
  return s;
}

// Two jobs on the tiny topology with room for both in sequence.
Scenario two_jobs() {
  return fixtures::with_jobs({fixtures::job("a", 1, 60, 0.066, 0.077, {{0.5, 4}, {1.0, 2}}),
                              fixtures::job("b", 1, 60, 0.066, 0.077, {{0.5, 4}, {1.0, 2}})},
                             {0.5, 1.0});
}

// Subset enumeration over a handful of instances, checked with the validator.
double brute_optimum(const std::vector<ScheduleInstance>& inst, const Scenario& s) {
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << inst.size()); ++mask) {
    Schedule sub;
    for (std::size_t i = 0; i < inst.size(); ++i)
      if (mask >> i & 1u) sub.add(inst[i]);
    if (sub.total_energy > best && validate(sub, s).ok()) best = sub.total_energy;
  }
  return best;
}

}  // namespace

TEST(Validator, EnumeratedInstanceIsValid) {
  const Scenario s = fixtures::tiny();
  EXPECT_TRUE(validate(of({enumerate_instances(s)[0]}), s).ok());
  EXPECT_TRUE(validate(Schedule{}, s).ok());
}

TEST(Validator, ShiftedOffloadBreaksForwarding) {
  const Scenario s = fixtures::tiny();
  auto l = enumerate_instances(s)[0];
  l.offload = {2, 21};
  const auto r = validate(of({l}), s);
  EXPECT_TRUE(has(r, "uplink-forward"));
  EXPECT_EQ(r.violations[0].jobs, std::vector<std::string>{"j0"});
}

TEST(Validator, WrongProcessingLength) {
  const Scenario s = fixtures::tiny();
  auto l = enumerate_instances(s)[0];
  l.process = {21, 24};
  EXPECT_TRUE(has(validate(of({l}), s), "duration"));
}

TEST(Validator, LateDownload) {
  const Scenario s = fixtures::tiny();
  auto l = enumerate_instances(s)[0];
  l.download = {31, 35};
  const auto r = validate(of({l}), s);
  EXPECT_TRUE(has(r, "deadline"));
  EXPECT_TRUE(has(r, "downlink-window"));
  EXPECT_TRUE(has(r, "horizon"));
}

TEST(Validator, EarlyOffloadBeforeRelease) {
  json doc = fixtures::tiny_doc();
  doc["jobs"][0]["release"] = 2;
  doc["jobs"][0]["windows"][0]["start"] = 2;
  doc["jobs"][0]["deadline"] = 31;
  doc["jobs"][0]["windows"][0]["end"] = 31;
  doc["jobs"][0]["windows"][1]["end"] = 31;
  doc["time_grid"].erase("horizon");
  const Scenario s = scenario_from_json(doc);
  auto l = enumerate_instances(s).at(0);
  l.offload = {1, 20};
  const auto r = validate(of({l}), s);
  EXPECT_TRUE(has(r, "release"));
  EXPECT_TRUE(has(r, "uplink-window"));
}

TEST(Validator, EnergyAndCapability) {
  const Scenario s = fixtures::tiny();
  auto l = enumerate_instances(s)[0];
  l.energy += 1.0;
  EXPECT_TRUE(has(validate(of({l}), s), "energy"));
  l = enumerate_instances(s)[0];
  l.allocation = 0.5;
  EXPECT_TRUE(has(validate(of({l}), s), "capability"));
  l = enumerate_instances(s)[0];
  l.uplink_window = 1;
  EXPECT_TRUE(has(validate(of({l}), s), "capability"));
}

TEST(Validator, VapConflictNamesBothJobsAndSlot) {
  const Scenario s = two_jobs();
  const auto all = enumerate_instances(s);
  const auto a = all.front();
  ScheduleInstance b = a;
  b.job = 1;
  b.energy = all.back().energy;
  const auto r = validate(of({a, b}), s);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.violations[0].constraint, "vap-exclusive");
  EXPECT_EQ(r.violations[0].machine, "u0");
  EXPECT_EQ(r.violations[0].slot, a.offload.start);
  EXPECT_EQ(r.violations[0].jobs, (std::vector<std::string>{"a", "b"}));
  EXPECT_NE(describe(r.violations[0]).find("vap-exclusive machine=u0"), std::string::npos);
}

TEST(Validator, ServerCapacityCountsAllocations) {
  const Scenario s = two_jobs();
  const auto all = enumerate_instances(s);
  auto pick = [&](std::size_t job, double c, int tu, int tp) {
    for (const auto& l : all)
      if (l.job == job && l.allocation == c && l.offload.start == tu && l.process.start == tp) return l;
    throw std::runtime_error("fixture instance missing");
  };
  // Offloads take 2 slots; two half allocations side by side are fine, two full ones are not.
  const auto a_half = pick(0, 0.5, 1, 5), b_half = pick(1, 0.5, 3, 5);
  EXPECT_FALSE(has(validate(of({a_half, b_half}), s), "server-capacity"));
  const auto a_full = pick(0, 1.0, 1, 5), b_full = pick(1, 1.0, 3, 6);
  EXPECT_TRUE(has(validate(of({a_full, b_full}), s), "server-capacity"));
}

TEST(Validator, OnePerJob) {
  const Scenario s = two_jobs();
  const auto l = enumerate_instances(s).front();
  EXPECT_TRUE(has(validate(of({l, l}), s), "one-per-job"));
}

TEST(ExactOptimum, HandExamples) {
  const MachineLayout layout{1, 1, 1};
  EXPECT_EQ(exact_optimum({}, layout).energy, 0.0);
  std::vector<ScheduleInstance> chain;
  for (std::size_t j = 0; j < 3; ++j)
    chain.push_back(make_instance(j, {static_cast<int>(j) + 1, static_cast<int>(j) + 1}, {5, 5}, {9, 9}, 1.0,
                                  1.0 + static_cast<double>(j)));
  EXPECT_DOUBLE_EQ(exact_optimum(chain, layout).energy, 3.0);
  const std::vector<ScheduleInstance> disjoint{make_instance(0, {1, 1}, {3, 3}, {5, 5}, 1.0, 2.0),
                                               make_instance(1, {2, 2}, {4, 4}, {6, 6}, 1.0, 3.0)};
  const auto r = exact_optimum(disjoint, layout);
  EXPECT_DOUBLE_EQ(r.energy, 5.0);
  EXPECT_EQ(r.witness.size(), 2u);
  // Two half allocations share the server; a third does not fit.
  const std::vector<ScheduleInstance> halves{make_instance(0, {1, 1}, {4, 6}, {8, 8}, 0.5, 1.0, 0, 0, 0),
                                             make_instance(1, {2, 2}, {4, 6}, {9, 9}, 0.5, 1.0, 0, 0, 0),
                                             make_instance(2, {3, 3}, {4, 6}, {10, 10}, 0.5, 1.5, 0, 0, 0)};
  EXPECT_DOUBLE_EQ(exact_optimum(halves, layout).energy, 2.5);
}

TEST(ExactOptimum, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Scenario s = generate(fixtures::tiny_config(seed, 4)).scenario;
    auto inst = enumerate_instances(s);
    std::shuffle(inst.begin(), inst.end(), rng);
    inst.resize(std::min<std::size_t>(inst.size(), 12));
    std::sort(inst.begin(), inst.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    EXPECT_NEAR(exact_optimum(inst, s.layout()).energy, brute_optimum(inst, s), 1e-12) << "seed " << seed;
  }
}

TEST(ExactOptimum, JobOrderDoesNotMatter) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Scenario s = generate(fixtures::tiny_config(seed, 5)).scenario;
    const auto inst = enumerate_instances(s);
    const auto a = exact_optimum(inst, s.layout());
    const auto b = exact_optimum(inst, s.layout(), {}, {4, 3, 2, 1, 0});
    EXPECT_NEAR(a.energy, b.energy, 1e-12);
    EXPECT_TRUE(validate(a.witness, s).ok());
    EXPECT_NEAR(a.witness.total_energy, a.energy, 1e-12);
  }
}

TEST(ExactOptimum, RefusesAboveCaps) {
  const MachineLayout layout{1, 1, 1};
  std::vector<ScheduleInstance> many;
  for (std::size_t j = 0; j < 9; ++j) many.push_back(make_instance(j, {1, 1}, {3, 3}, {5, 5}, 1.0, 1.0));
  EXPECT_THROW(exact_optimum(many, layout), OracleRefused);
  many.pop_back();
  EXPECT_NO_THROW(exact_optimum(many, layout));
  EXPECT_THROW(exact_optimum(many, layout, {8, 7}), OracleRefused);
}

TEST(LiteralEnumerator, AgreesWithTightenedEnumerator) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorConfig cfg = fixtures::tiny_config(seed, 3);
    cfg.max_windows = 2;
    const Scenario s = generate(cfg).scenario;
    auto lit = literal_instances(s);
    std::sort(lit.begin(), lit.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    const auto fast = enumerate_instances(s);
    ASSERT_EQ(lit.size(), fast.size()) << "seed " << seed;
    for (std::size_t i = 0; i < lit.size(); ++i) ASSERT_EQ(lit[i], fast[i]) << "seed " << seed << " at " << i;
  }
}
