#include <gtest/gtest.h>

#include <sstream>

#include "tpsim/field.hpp"
#include "tpsim/scenarios.hpp"

using namespace tpsim;

namespace {

RelevancePath terminal_at(double effort, double effect, SessionStatus status = SessionStatus::completed) {
  RelevancePath p;
  p.points = {{}, {effort, effect, 3}};
  p.terminal_status = status;
  return p;
}

SweepBase hard_base() {
  const Scenario s = scen_hard();
  return {s.task, s.monitor, {}};
}

}  // namespace

TEST(TracePath, EmptyTraceIsOrigin) {
  const RelevancePath p = trace_path(SessionTrace{});
  ASSERT_EQ(p.points.size(), 1u);
  EXPECT_EQ(p.terminal(), PathPoint{});
}

TEST(TracePath, CumulativeAndMonotone) {
  TaskConfig cfg = scen_hard().task;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    const auto trace = run_session(build_task(cfg), MonitorConfig{}, seed);
    const auto p = trace_path(trace);
    ASSERT_EQ(p.points.size(), trace.records.size() + 1);
    for (std::size_t k = 1; k < p.points.size(); ++k) {
      EXPECT_GE(p.points[k].effort, p.points[k - 1].effort);
      EXPECT_GE(p.points[k].effect, p.points[k - 1].effect);
      EXPECT_GE(p.points[k].tick, p.points[k - 1].tick);
    }
    EXPECT_NEAR(p.terminal().effort, trace.totals.effort, 1e-9);
  }
}

TEST(TracePath, ScenEasy) {
  const auto trace = run_session(build_task(scen_easy().task), MonitorConfig{}, 42);
  const auto p = trace_path(trace);
  EXPECT_LT(p.terminal().effort, 1.0);
  EXPECT_GT(p.terminal().effect, 0.0);
}

TEST(Boundary, Validation) {
  RelevanceBoundary b;
  EXPECT_NO_THROW(b.validate());
  EXPECT_DOUBLE_EQ(b.required_effect(b.e_max), b.f_min);
  b.curve = {{0, 1}, {5, 3}, {10, 2}};
  EXPECT_THROW(b.validate(), ConfigError);
  b.curve = {{0, 1}, {5, 1.5}};
  EXPECT_THROW(b.validate(), ConfigError);
  b.curve = {{0, 1}, {10, 2}, {30, 9}};
  EXPECT_NO_THROW(b.validate());
  EXPECT_DOUBLE_EQ(b.required_effect(5), 1.5);
}

TEST(Classify, Regions) {
  RelevanceBoundary b;
  b.f_min = 1.0;
  b.curve = {{0, 0.5}, {10, 1}, {20, 3}};
  EXPECT_EQ(classify_path(terminal_at(0.5, 5.0), b), PathClass::HighRelevance);
  EXPECT_EQ(classify_path(terminal_at(15, 5.0), b), PathClass::EffortfulSuccess);
  EXPECT_EQ(classify_path(terminal_at(0.5, 5.0, SessionStatus::abandoned), b), PathClass::Abandoned);
  EXPECT_EQ(classify_path(terminal_at(0.5, 0.2), b), PathClass::Irrelevant);
}

TEST(Classify, NamesRoundTrip) {
  for (PathClass c : {PathClass::HighRelevance, PathClass::EffortfulSuccess, PathClass::Abandoned, PathClass::Irrelevant})
    EXPECT_EQ(path_class_from_string(to_string(c)), c);
  EXPECT_THROW(path_class_from_string("Nope"), std::invalid_argument);
}

TEST(Grid, Parse) {
  const GridAxis a = parse_grid_axis("rho=0.1:0.9:0.2");
  EXPECT_EQ(a.param, SweepParam::rho);
  const auto v = a.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v.back(), 0.1 + 4 * 0.2);
  EXPECT_EQ(parse_grid_axis("budget=5:5:1").values().size(), 1u);
  EXPECT_THROW(parse_grid_axis("rhoo=0:1:0.5"), ConfigError);
  EXPECT_THROW(parse_grid_axis("rho=0:1"), ConfigError);
  EXPECT_THROW(parse_grid_axis("rho=1:0:0.5"), ConfigError);
  EXPECT_THROW(parse_grid_axis("rho=0:1:0"), ConfigError);
  EXPECT_THROW(parse_grid_axis("rho"), ConfigError);
}

TEST(Sweep, Cardinality) {
  const auto rows = field_sweep(hard_base(), {GridAxis{SweepParam::rho, 0.1, 0.5, 0.2}}, 10, 3);
  ASSERT_EQ(rows.size(), 30u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].grid_point, k / 10);
    EXPECT_EQ(rows[k].replica, k % 10);
  }
  EXPECT_EQ(rows[0].seed, rows[10].seed);
  EXPECT_THROW(field_sweep(hard_base(), {}, 10, 3), ConfigError);
  EXPECT_THROW(field_sweep(hard_base(), default_sweep_grid(), 0, 3), ConfigError);
}

TEST(Sweep, TwoAxes) {
  const auto rows = field_sweep(hard_base(), {parse_grid_axis("rho=0.1:0.5:0.4"), parse_grid_axis("theta=1:3:1")}, 2, 3);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_DOUBLE_EQ(rows[0].theta, 1.0);
  EXPECT_DOUBLE_EQ(rows[2].theta, 2.0);
  EXPECT_DOUBLE_EQ(rows[6].rho, 0.5);
}

TEST(Sweep, DeterministicTable) {
  std::ostringstream a, b;
  write_sweep_table(field_sweep(hard_base(), default_sweep_grid(), 20, 11), a);
  write_sweep_table(field_sweep(hard_base(), default_sweep_grid(), 20, 11), b);
  EXPECT_EQ(a.str(), b.str());
  const auto serial = field_sweep_sessions(hard_base(), default_sweep_grid(), 20, 11, 1);
  const auto parallel = field_sweep_sessions(hard_base(), default_sweep_grid(), 20, 11, 4);
  for (std::size_t k = 0; k < serial.size(); ++k) EXPECT_EQ(serial[k].row, parallel[k].row);
}

TEST(Sweep, TableRoundTrip) {
  const auto rows = field_sweep(hard_base(), default_sweep_grid(), 5, 2);
  std::stringstream s;
  write_sweep_table(rows, s);
  EXPECT_EQ(read_sweep_table(s), rows);
}

TEST(Sweep, TriggerRateFallsWithRho) {
  const auto rows = field_sweep(hard_base(), default_sweep_grid(), 500, 7);
  std::vector<double> rate(5, 0.0);
  for (const auto& r : rows) rate[r.grid_point] += static_cast<double>(r.imode_count) / 500.0;
  for (std::size_t k = 1; k < rate.size(); ++k) EXPECT_LE(rate[k], rate[k - 1]) << "grid point " << k;
}

TEST(Terciles, PooledRatio) {
  std::vector<SweepRow> rows(6);
  const double effort[] = {1, 2, 3, 4, 5, 6}, effect[] = {10, 18, 24, 28, 30, 31};
  for (std::size_t k = 0; k < 6; ++k) {
    rows[k].path_class = PathClass::EffortfulSuccess;
    rows[k].terminal_effort = effort[k];
    rows[k].terminal_effect = effect[k];
  }
  rows.push_back(SweepRow{});
  const auto t = tercile_returns(rows);
  EXPECT_EQ(t.sessions, 6u);
  EXPECT_DOUBLE_EQ(t.pooled_ratio[0], 28.0 / 3.0);
  EXPECT_DOUBLE_EQ(t.pooled_ratio[1], 52.0 / 7.0);
  EXPECT_DOUBLE_EQ(t.pooled_ratio[2], 61.0 / 11.0);
  EXPECT_DOUBLE_EQ(t.mean_effort[0], 1.5);
}
