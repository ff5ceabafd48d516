#pragma once

/**
 * @file cli.hpp
 * @brief Subcommands behind the `tpsim` executable.
 *
 * Exit codes: 0 success, 1 validation failure, 2 usage, config or I/O error.
 */

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tpsim/agent.hpp"
#include "tpsim/config.hpp"
#include "tpsim/csv.hpp"
#include "tpsim/field.hpp"
#include "tpsim/scenarios.hpp"
#include "tpsim/serialize.hpp"
#include "tpsim/tu_stream.hpp"
#include "tpsim/validate.hpp"
#include "tpsim/world.hpp"

namespace tpsim::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kUsage = 2 };

struct Options {
  std::string command;  ///< run | sweep | field | demo | validate
  std::string demo_name;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> replicas;
  std::vector<std::string> grid;
  bool deterministic_actions = false;
  bool svg = false;
};

/// Raised for unwritable destinations and similar I/O failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline RunConfig resolve_config(const Options& opt, const std::optional<Scenario>& fallback = std::nullopt) {
  RunConfig cfg;
  if (opt.config_path) {
    cfg = load_config(*opt.config_path);
  } else if (fallback) {
    cfg.task = fallback->task;
    cfg.monitor = fallback->monitor;
  }
  if (opt.seed) cfg.master_seed = *opt.seed;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (opt.deterministic_actions) cfg.monitor.deterministic_actions = true;
  cfg.validate();
  return cfg;
}

inline std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return dir;
}

inline std::ofstream open(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw IoError("write failed for '" + p.string() + "'");
}

inline std::vector<GridAxis> resolve_grid(const Options& opt) {
  if (opt.grid.empty()) return default_sweep_grid();
  std::vector<GridAxis> grid;
  for (const auto& g : opt.grid) grid.push_back(parse_grid_axis(g));
  return grid;
}

inline std::string session_id(std::uint64_t seed) { return "s" + std::to_string(seed); }

}  // namespace detail

/// `run`: one session, three artifacts.
inline int cmd_run(const Options& opt, std::ostream& log) {
  const RunConfig cfg = detail::resolve_config(opt);
  const auto dir = detail::prepare_dir(cfg.output_dir);
  const TranslationTask task = build_task(cfg.task, cfg.monitor.habit_strength);
  const SessionTrace trace = run_session(task, cfg.monitor, cfg.master_seed);
  const RelevancePath path = trace_path(trace);
  const PathClass cls = classify_path(path, cfg.boundary);
  const auto events = emit_events(trace, cfg.timing, RngStream(cfg.master_seed).split(stream_tag::kEvents));
  const std::string id = detail::session_id(cfg.master_seed);
  const auto rows = summarize_tus(events, trace, id, cls);

  auto write = [&](const char* name, auto&& body) {
    const auto p = dir / name;
    auto out = detail::open(p);
    body(out);
    detail::finish(out, p);
  };
  write("events.csv", [&](std::ostream& o) { write_events(events, o); });
  write("tu_summary.csv", [&](std::ostream& o) { write_table(rows, o); });
  write("session.json", [&](std::ostream& o) {
    auto doc = json::session_document(id, cfg.master_seed, task, trace, path, cls);
    doc["config"] = to_json(cfg);
    doc["config"].erase("output_dir");
    o << doc.dump(2) << '\n';
  });
  log << id << ": " << trace.records.size() << " units, " << trace.totals.imode_triggers << " i-mode, "
      << to_string(trace.status) << ", class " << to_string(cls) << ", relevance " << session_relevance(trace) << '\n';
  return kOk;
}

inline int cmd_sweep(const Options& opt, std::ostream& log) {
  const RunConfig cfg = detail::resolve_config(opt);
  const auto grid = detail::resolve_grid(opt);
  const std::size_t replicas = opt.replicas.value_or(kDefaultReplicas);
  const auto dir = detail::prepare_dir(cfg.output_dir);
  const auto rows = field_sweep(cfg.sweep_base(), grid, replicas, cfg.master_seed);
  const auto p = dir / "sweep.csv";
  auto out = detail::open(p);
  write_sweep_table(rows, out);
  detail::finish(out, p);
  log << rows.size() << " sessions written to " << p.string() << '\n';
  return kOk;
}

inline constexpr std::string_view kFieldHeader = "grid_point,replica,step,effort,effect,tick,class";

/// Paths over the boundary as an SVG polyline plot.
inline void write_field_svg(const std::vector<SweepSession>& sessions, const RelevanceBoundary& boundary,
                            std::ostream& out) {
  constexpr double W = 640, H = 480, pad = 40;
  double max_e = boundary.e_max * 2.0, max_f = boundary.f_min * 2.0;
  for (const auto& s : sessions)
    for (const auto& p : s.path.points) {
      if (std::isfinite(p.effort)) max_e = std::max(max_e, p.effort);
      if (std::isfinite(p.effect)) max_f = std::max(max_f, p.effect);
    }
  auto x = [&](double e) { return pad + (W - 2 * pad) * std::min(e, max_e) / max_e; };
  auto y = [&](double f) { return H - pad - (H - 2 * pad) * std::min(f, max_f) / max_f; };
  auto color = [](PathClass c) {
    switch (c) {
      case PathClass::HighRelevance: return "#1b9e77";
      case PathClass::EffortfulSuccess: return "#7570b3";
      case PathClass::Abandoned: return "#d95f02";
      case PathClass::Irrelevant: return "#999999";
    }
    return "#000000";
  };
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\">effort (nats)</text>\n";
  out << "<text x=\"6\" y=\"" << pad - 10 << "\" font-size=\"12\">effect</text>\n";
  for (const auto& s : sessions) {
    out << "<polyline fill=\"none\" stroke-opacity=\"0.35\" stroke=\"" << color(s.row.path_class) << "\" points=\"";
    for (const auto& p : s.path.points)
      if (std::isfinite(p.effort) && std::isfinite(p.effect)) out << x(p.effort) << ',' << y(p.effect) << ' ';
    out << "\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"black\" stroke-dasharray=\"6 3\" points=\"";
  for (const auto& [e, f] : boundary.curve_points()) out << x(e) << ',' << y(f) << ' ';
  out << "\"/>\n</svg>\n";
}

inline int cmd_field(const Options& opt, std::ostream& log) {
  const RunConfig cfg = detail::resolve_config(opt);
  const auto grid = detail::resolve_grid(opt);
  const std::size_t replicas = opt.replicas.value_or(kDefaultReplicas);
  const auto dir = detail::prepare_dir(cfg.output_dir);
  const auto sessions = field_sweep_sessions(cfg.sweep_base(), grid, replicas, cfg.master_seed);

  const auto p = dir / "field.csv";
  auto out = detail::open(p);
  out << kFieldHeader << '\n';
  for (const auto& s : sessions)
    for (std::size_t k = 0; k < s.path.points.size(); ++k) {
      const PathPoint& pt = s.path.points[k];
      out << s.row.grid_point << ',' << s.row.replica << ',' << k << ',' << csv::format(pt.effort) << ','
          << csv::format(pt.effect) << ',' << pt.tick << ',' << to_string(s.row.path_class) << '\n';
    }
  detail::finish(out, p);
  if (opt.svg) {
    const auto svg_path = dir / "field.svg";
    auto svg = detail::open(svg_path);
    write_field_svg(sessions, cfg.boundary, svg);
    detail::finish(svg, svg_path);
  }
  log << sessions.size() << " paths written to " << p.string() << '\n';
  return kOk;
}

struct Table1Row {
  std::string condition;
  std::size_t sessions = 0;
  double mean_effort_nats = 0.0;   ///< per session
  double mean_tu_dur_ms = 0.0;     ///< per unit
  double mean_pause_ms = 0.0;      ///< per unit
  double mean_effect = 0.0;        ///< per session
  double imode_share = 0.0;
};

inline constexpr std::string_view kTable1Header =
    "condition,sessions,mean_effort_nats,mean_tu_dur_ms,mean_pause_ms,mean_effect,imode_share";

/// S-mode only (the monitor never fires) against i-mode forced (every unit
/// gets one repair, no budget), on the same tasks and seeds.
inline std::vector<Table1Row> demo_table1(const RunConfig& cfg, std::size_t replicas) {
  MonitorConfig smode = cfg.monitor;
  smode.theta = std::numeric_limits<double>::infinity();
  MonitorConfig imode = cfg.monitor;
  imode.theta = -1.0;
  imode.imode_max_iterations = 1;
  imode.effort_budget = std::numeric_limits<double>::max();

  std::vector<Table1Row> rows;
  for (const auto& [name, monitor] : {std::pair{"smode_only", smode}, std::pair{"imode_forced", imode}}) {
    Table1Row row{name};
    double units = 0, dur = 0, pause = 0, imode_units = 0;
    for (std::size_t r = 0; r < replicas; ++r) {
      const std::uint64_t seed = derive_seed(cfg.master_seed, r);
      TaskConfig tc = cfg.task;
      tc.seed = seed;
      const TranslationTask task = build_task(tc, monitor.habit_strength);
      const SessionTrace trace = run_session(task, monitor, derive_seed(seed, 1));
      const auto events = emit_events(trace, cfg.timing, RngStream(seed).split(stream_tag::kEvents));
      const auto cls = classify_path(trace_path(trace), cfg.boundary);
      for (const auto& u : summarize_tus(events, trace, detail::session_id(seed), cls)) {
        units += 1;
        dur += static_cast<double>(u.dur_ms);
        pause += static_cast<double>(u.pause_before_ms);
        if (u.mode == Mode::imode) imode_units += 1;
      }
      row.mean_effort_nats += trace.totals.effort;
      row.mean_effect += trace.totals.effect;
      ++row.sessions;
    }
    row.mean_effort_nats /= static_cast<double>(replicas);
    row.mean_effect /= static_cast<double>(replicas);
    row.mean_tu_dur_ms = dur / units;
    row.mean_pause_ms = pause / units;
    row.imode_share = imode_units / units;
    rows.push_back(row);
  }
  return rows;
}

inline int cmd_demo(const Options& opt, std::ostream& log) {
  if (opt.demo_name != "table1") throw std::invalid_argument("unknown demo '" + opt.demo_name + "'");
  const RunConfig cfg = detail::resolve_config(opt, scen_hard());
  const auto dir = detail::prepare_dir(cfg.output_dir);
  const auto rows = demo_table1(cfg, opt.replicas.value_or(kDefaultReplicas));
  const auto p = dir / "demo_table1.csv";
  auto out = detail::open(p);
  out << kTable1Header << '\n';
  for (const auto& r : rows)
    out << r.condition << ',' << r.sessions << ',' << csv::format(r.mean_effort_nats) << ','
        << csv::format(r.mean_tu_dur_ms) << ',' << csv::format(r.mean_pause_ms) << ',' << csv::format(r.mean_effect)
        << ',' << csv::format(r.imode_share) << '\n';
  detail::finish(out, p);
  for (const auto& r : rows)
    log << std::left << std::setw(14) << r.condition << " effort " << r.mean_effort_nats << " nats, TU "
        << r.mean_tu_dur_ms << " ms, effect " << r.mean_effect << '\n';
  return kOk;
}

inline int cmd_validate(const Options& opt, std::ostream& log) {
  const RunConfig cfg = detail::resolve_config(opt);
  const auto dir = detail::prepare_dir(cfg.output_dir);
  const ValidationReport report = run_validation();
  const std::string text = to_json(report).dump(2);
  const auto p = dir / "validate_report.json";
  auto out = detail::open(p);
  out << text << '\n';
  detail::finish(out, p);
  log << text << '\n';
  return report.passed() ? kOk : kValidationFailed;
}

/// Runs a parsed command. Errors are reported on `err` and mapped to exit codes.
inline int execute(const Options& opt, std::ostream& log, std::ostream& err) {
  try {
    if (opt.command == "run") return cmd_run(opt, log);
    if (opt.command == "sweep") return cmd_sweep(opt, log);
    if (opt.command == "field") return cmd_field(opt, log);
    if (opt.command == "demo") return cmd_demo(opt, log);
    if (opt.command == "validate") return cmd_validate(opt, log);
    err << "error: unknown command '" << opt.command << "'\n";
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kUsage;
}

}  // namespace tpsim::cli
