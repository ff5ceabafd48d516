#include <iostream>

#include "CLI11.hpp"
#include "tpsim/cli.hpp"

int main(int argc, char** argv) {
  using tpsim::cli::Options;
  Options opt;
  CLI::App app{"Two-mode translation monitor simulator"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration");
    sub->add_option("--seed", opt.seed, "master seed (overrides the config)");
    sub->add_option("--out", opt.out_dir, "output directory (overrides the config)");
    sub->add_flag("--deterministic-actions", opt.deterministic_actions, "argmax instead of sampling");
  };
  auto sweeping = [&](CLI::App* sub) {
    sub->add_option("--replicas", opt.replicas, "sessions per grid point")->check(CLI::PositiveNumber);
    sub->add_option("--grid", opt.grid, "param=lo:hi:step, repeatable; params rho kappa theta gamma budget");
  };

  auto* run = app.add_subcommand("run", "one session: events.csv, tu_summary.csv, session.json");
  common(run);
  auto* sweep = app.add_subcommand("sweep", "parameter sweep: sweep.csv");
  common(sweep);
  sweeping(sweep);
  auto* field = app.add_subcommand("field", "relevance paths: field.csv and optionally field.svg");
  common(field);
  sweeping(field);
  field->add_flag("--svg", opt.svg, "also render field.svg");
  auto* demo = app.add_subcommand("demo", "canned comparisons");
  common(demo);
  demo->add_option("name", opt.demo_name, "demo to run (table1)")->required();
  demo->add_option("--replicas", opt.replicas, "sessions per condition")->check(CLI::PositiveNumber);
  auto* validate = app.add_subcommand("validate", "invariant battery: validate_report.json");
  common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tpsim::cli::kUsage;
  }
  for (auto* sub : {run, sweep, field, demo, validate})
    if (sub->parsed()) opt.command = sub->get_name();
  return tpsim::cli::execute(opt, std::cout, std::cerr);
}
