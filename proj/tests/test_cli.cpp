#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpsim/cli.hpp"

#ifndef TPSIM_CONFIG_DIR
#error "TPSIM_CONFIG_DIR must point at the shipped configs"
#endif

using namespace tpsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tpsim_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int exec(cli::Options opt, std::string* err_text = nullptr) {
  std::ostringstream log, err;
  const int code = cli::execute(opt, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST(Config, EmptyDocumentIsDefaults) {
  const RunConfig cfg = parse_config("");
  EXPECT_EQ(to_json(cfg), to_json(RunConfig{}));
  EXPECT_EQ(to_json(parse_config("{}")), to_json(RunConfig{}));
  EXPECT_EQ(cfg.task.context_overlap, scen_easy().task.context_overlap);
  EXPECT_EQ(cfg.task.senses_per_token, 1u);
  EXPECT_EQ(cfg.monitor.theta, 1.5);
  EXPECT_EQ(cfg.timing.imode_pause_base_ms, 1200.0);
}

TEST(Config, UnknownKeyNamed) {
  try {
    parse_config(R"({"thetta": 2})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "thetta");
    EXPECT_NE(std::string(e.what()).find("thetta"), std::string::npos);
  }
  try {
    parse_config(R"({"monitor": {"thetta": 2}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "monitor.thetta");
  }
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config("[]"), ConfigError);
  EXPECT_THROW(parse_config(R"({"task": {"lexicon_size": -1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"task": {"lexicon_size": 2.5}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"monitor": {"theta": "high"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"monitor": {"deterministic_actions": 1}})"), ConfigError);
  try {
    parse_config(R"({"task": {"context_overlap": 1.2}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "task.context_overlap");
  }
  EXPECT_THROW(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST(Config, ShippedScenarios) {
  const fs::path dir = TPSIM_CONFIG_DIR;
  const RunConfig hard = load_config((dir / "scen_hard.json").string());
  EXPECT_DOUBLE_EQ(hard.task.context_overlap, 0.3);
  EXPECT_EQ(hard.task.ambiguous_count(), 1u);
  EXPECT_EQ(hard.task.senses_per_token, 2u);

  const auto same = [](const TaskConfig& a, const TaskConfig& b) {
    return json::to_json(a) == json::to_json(b);
  };
  EXPECT_TRUE(same(load_config((dir / "scen_easy.json").string()).task, scen_easy().task));
  EXPECT_TRUE(same(hard.task, scen_hard().task));
  const RunConfig blocked = load_config((dir / "scen_blocked.json").string());
  EXPECT_TRUE(same(blocked.task, scen_blocked().task));
  EXPECT_EQ(blocked.monitor.effort_budget, scen_blocked().monitor.effort_budget);
  EXPECT_NO_THROW(load_config((dir / "default_sweep.json").string()));
}

TEST(Config, EchoRoundTrip) {
  RunConfig cfg;
  cfg.task = scen_blocked().task;
  cfg.boundary.curve = {{0, 1}, {10, 2}, {40, 8}};
  cfg.timing.jitter_fraction = 0.25;
  cfg.master_seed = 12345;
  EXPECT_EQ(to_json(parse_config(to_json(cfg).dump())), to_json(cfg));
}

TEST(Cli, RunWritesExactlyThreeFiles) {
  const auto dir = scratch("run");
  cli::Options opt;
  opt.command = "run";
  opt.out_dir = dir.string();
  ASSERT_EQ(exec(opt), 0);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"events.csv", "session.json", "tu_summary.csv"}));
  const auto doc = nlohmann::json::parse(slurp(dir / "session.json"));
  for (const char* key : {"trace", "relevance_path", "class", "task"}) EXPECT_TRUE(doc.contains(key)) << key;
}

TEST(Cli, CommandsAreDeterministic) {
  for (const std::string command : {"run", "sweep", "field", "demo"}) {
    std::vector<std::string> outputs;
    for (const char* tag : {"a", "b"}) {
      const auto dir = scratch(command + tag);
      cli::Options opt;
      opt.command = command;
      opt.demo_name = "table1";
      opt.out_dir = dir.string();
      opt.replicas = 8;
      opt.seed = 5;
      opt.svg = true;
      opt.config_path = (fs::path(TPSIM_CONFIG_DIR) / "scen_hard.json").string();
      ASSERT_EQ(exec(opt), 0) << command;
      std::string all;
      for (const auto& e : fs::directory_iterator(dir)) all += e.path().filename().string() + slurp(e.path());
      outputs.push_back(all);
    }
    EXPECT_EQ(outputs[0], outputs[1]) << command;
  }
}

TEST(Cli, DemoTable1Ordering) {
  RunConfig cfg;
  cfg.task = scen_hard().task;
  cfg.monitor = scen_hard().monitor;
  const auto rows = cli::demo_table1(cfg, 100);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].condition, "smode_only");
  EXPECT_LT(rows[0].mean_effort_nats, rows[1].mean_effort_nats);
  EXPECT_LT(rows[0].mean_tu_dur_ms, rows[1].mean_tu_dur_ms);
  EXPECT_EQ(rows[0].imode_share, 0.0);
}

TEST(Cli, ValidateExitsZero) {
  const auto dir = scratch("validate");
  cli::Options opt;
  opt.command = "validate";
  opt.out_dir = dir.string();
  ASSERT_EQ(exec(opt), 0);
  const auto report = nlohmann::json::parse(slurp(dir / "validate_report.json"));
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_EQ(report["modules"].get<std::vector<std::string>>(), validated_modules());
}

TEST(Cli, ErrorsMapToExitTwo) {
  cli::Options opt;
  opt.command = "frobnicate";
  std::string err;
  EXPECT_EQ(exec(opt, &err), 2);
  EXPECT_NE(err.find("frobnicate"), std::string::npos);

  opt.command = "run";
  const auto blocker = scratch("blocker");
  std::ofstream(blocker.string()) << "file";
  opt.out_dir = (blocker / "sub").string();
  EXPECT_EQ(exec(opt, &err), 2);
  EXPECT_NE(err.find("output directory"), std::string::npos);

  opt.out_dir = scratch("badgrid").string();
  opt.command = "sweep";
  opt.grid = {"zeta=0:1:0.5"};
  EXPECT_EQ(exec(opt), 2);

  opt.command = "demo";
  opt.demo_name = "table9";
  EXPECT_EQ(exec(opt), 2);
  fs::remove(blocker);
}
