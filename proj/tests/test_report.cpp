#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"

using namespace mecsched;
using fixtures::json;

TEST(Metrics, RatioEdges) {
  MetricsRow r;
  r.energy = 0.25;
  r.lp_bound = 0.25;
  EXPECT_EQ(r.ratio(), 1.0);
  r.energy = 0.0;
  r.lp_bound = 0.0;
  EXPECT_EQ(r.ratio(), 0.0);
  r.energy = 1.0;
  r.lp_bound = 4.0;
  EXPECT_EQ(r.ratio(), 0.25);
}

TEST(Metrics, CsvLayout) {
  std::ostringstream out;
  write_metrics_header(out);
  MetricsRow r{"demo", "lhjs", 0.5, 2.0, 12.5, 7, 0.125, 0.75};
  write_metrics_row(out, r);
  write_metrics_row(out, r, false);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("# ", 0), 0u);
  EXPECT_NE(text.find("\nscenario,algorithm,energy,lp_bound,ratio,runtime_ms,seed,u_b,u_c\n"), std::string::npos);
  EXPECT_NE(text.find("demo,lhjs,0.5,2,0.25,12.5,7,0.125,0.75\n"), std::string::npos);
  EXPECT_NE(text.find("demo,lhjs,0.5,2,0.25,,7,0.125,0.75\n"), std::string::npos);
}

TEST(ScheduleJson, RoundTrip) {
  const Scenario s = generate(fixtures::tiny_config(4, 6)).scenario;
  const Schedule a = lhjs(s, 3).schedule;
  const json doc = schedule_to_json(a, s, "lhjs");
  EXPECT_EQ(doc["algorithm"], "lhjs");
  Schedule b = schedule_from_json(json::parse(doc.dump()), s);
  b.normalize();
  EXPECT_EQ(a.selected, b.selected);
  EXPECT_DOUBLE_EQ(a.total_energy, b.total_energy);
}

TEST(ScheduleJson, UnknownIdsAreRejectedWithPath) {
  const Scenario s = fixtures::tiny();
  json doc = schedule_to_json(lbs(s).schedule, s, "lbs");
  doc["instances"][0]["server"] = "nowhere";
  try {
    schedule_from_json(doc, s);
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("instances[0].server"), std::string::npos);
  }
  EXPECT_THROW(schedule_from_json(json::object(), s), ScenarioError);
}

TEST(Report, TimingFieldsOptional) {
  LhjsReport r;
  r.branch = "light";
  EXPECT_TRUE(lhjs_report_json(r, true).contains("prepare_ms"));
  EXPECT_FALSE(lhjs_report_json(r, false).contains("prepare_ms"));
  EXPECT_EQ(lhjs_report_json(r, false)["branch"], "light");
}

TEST(Gantt, OneBarPerOperation) {
  const Scenario s = fixtures::tiny();
  std::ostringstream out;
  write_gantt_svg(out, lbs(s).schedule, s);
  const std::string svg = out.str();
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("j0 offload [1,20]"), std::string::npos);
  EXPECT_NE(svg.find("j0 process [21,25]"), std::string::npos);
  EXPECT_NE(svg.find("j0 download [26,30]"), std::string::npos);
  for (const char* lane : {">u0<", ">s0<", ">d0<"}) EXPECT_NE(svg.find(lane), std::string::npos);
}

TEST(Format, ShortestRepresentation) {
  EXPECT_EQ(format_number(0.1503), "0.1503");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
}
