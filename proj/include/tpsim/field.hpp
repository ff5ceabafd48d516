#pragma once

/**
 * @file field.hpp
 * @brief Effort/effect paths through the field of relevance, their
 *        classification against a boundary, and parameter sweeps.
 */

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "tpsim/agent.hpp"
#include "tpsim/csv.hpp"
#include "tpsim/error.hpp"
#include "tpsim/rng.hpp"
#include "tpsim/world.hpp"

namespace tpsim {

struct PathPoint {
  Nats effort = 0.0;
  double effect = 0.0;
  std::uint64_t tick = 0;

  friend bool operator==(const PathPoint&, const PathPoint&) = default;
};

struct RelevancePath {
  std::vector<PathPoint> points;
  SessionStatus terminal_status = SessionStatus::completed;

  [[nodiscard]] const PathPoint& terminal() const { return points.back(); }
};

/// Origin plus one cumulative point per record.
inline RelevancePath trace_path(const SessionTrace& trace) {
  RelevancePath path;
  path.terminal_status = trace.status;
  path.points.reserve(trace.records.size() + 1);
  PathPoint p;
  path.points.push_back(p);
  for (const TuRecord& rec : trace.records) {
    p.effort += rec.effort();
    p.effect += rec.effect;
    p.tick += rec.fast_ticks;
    path.points.push_back(p);
  }
  return path;
}

/// Acceptable-effort bound, worthwhile-effect bound, and a monotone
/// piecewise-linear curve of required effect through (e_max, f_min).
struct RelevanceBoundary {
  Nats e_max = 10.0;
  double f_min = 2.0;
  std::vector<std::pair<double, double>> curve;  ///< (effort, required effect); empty = default shape

  [[nodiscard]] std::vector<std::pair<double, double>> curve_points() const {
    if (!curve.empty()) return curve;
    return {{0.0, 0.5 * f_min}, {e_max, f_min}, {2.0 * e_max, 3.0 * f_min}};
  }

  [[nodiscard]] double required_effect(Nats effort) const {
    const auto pts = curve_points();
    if (effort <= pts.front().first) return pts.front().second;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (effort <= pts[i].first) {
        const auto [x0, y0] = pts[i - 1];
        const auto [x1, y1] = pts[i];
        return x1 == x0 ? y1 : y0 + (y1 - y0) * (effort - x0) / (x1 - x0);
      }
    }
    return pts.back().second;
  }

  void validate() const {
    if (!(e_max > 0.0) || std::isinf(e_max)) throw ConfigError("boundary.e_max", "must be finite and > 0");
    if (!std::isfinite(f_min)) throw ConfigError("boundary.f_min", "must be finite");
    const auto pts = curve_points();
    bool through = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!std::isfinite(pts[i].first) || !std::isfinite(pts[i].second))
        throw ConfigError("boundary.curve", "points must be finite");
      if (i > 0 && (pts[i].first < pts[i - 1].first || pts[i].second < pts[i - 1].second))
        throw ConfigError("boundary.curve", "must be non-decreasing in effort and effect");
      if (std::abs(pts[i].first - e_max) <= 1e-12 && std::abs(pts[i].second - f_min) <= 1e-12) through = true;
    }
    if (!through) throw ConfigError("boundary.curve", "must pass through (e_max, f_min)");
  }
};

enum class PathClass { HighRelevance, EffortfulSuccess, Abandoned, Irrelevant };

inline const char* to_string(PathClass c) noexcept {
  switch (c) {
    case PathClass::HighRelevance: return "HighRelevance";
    case PathClass::EffortfulSuccess: return "EffortfulSuccess";
    case PathClass::Abandoned: return "Abandoned";
    case PathClass::Irrelevant: return "Irrelevant";
  }
  return "?";
}

inline PathClass path_class_from_string(std::string_view s) {
  for (PathClass c : {PathClass::HighRelevance, PathClass::EffortfulSuccess, PathClass::Abandoned, PathClass::Irrelevant})
    if (s == to_string(c)) return c;
  throw std::invalid_argument("unknown path class '" + std::string(s) + "'");
}

inline PathClass classify_path(const RelevancePath& path, const RelevanceBoundary& boundary) {
  if (path.terminal_status == SessionStatus::abandoned) return PathClass::Abandoned;
  const PathPoint& end = path.terminal();
  if (end.effect >= boundary.f_min) return end.effort <= boundary.e_max ? PathClass::HighRelevance : PathClass::EffortfulSuccess;
  return PathClass::Irrelevant;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParam { rho, kappa, theta, gamma, budget };

inline const char* to_string(SweepParam p) noexcept {
  switch (p) {
    case SweepParam::rho: return "rho";
    case SweepParam::kappa: return "kappa";
    case SweepParam::theta: return "theta";
    case SweepParam::gamma: return "gamma";
    case SweepParam::budget: return "budget";
  }
  return "?";
}

struct GridAxis {
  SweepParam param = SweepParam::rho;
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  void validate() const {
    const std::string field = std::string("grid.") + to_string(param);
    if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) throw ConfigError(field, "bounds must be finite");
    if (hi < lo) throw ConfigError(field, "hi must not be below lo");
    if (!(step > 0.0)) throw ConfigError(field, "step must be > 0");
  }

  [[nodiscard]] std::vector<double> values() const {
    validate();
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
    return v;
  }
};

/// Parses `param=lo:hi:step`, e.g. `rho=0.1:0.9:0.2`.
inline GridAxis parse_grid_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("grid", "expected param=lo:hi:step, got '" + std::string(text) + "'");
  const std::string_view name = text.substr(0, eq);
  GridAxis axis;
  bool known = false;
  for (SweepParam p : {SweepParam::rho, SweepParam::kappa, SweepParam::theta, SweepParam::gamma, SweepParam::budget})
    if (name == to_string(p)) {
      axis.param = p;
      known = true;
    }
  if (!known) throw ConfigError("grid", "unknown sweep parameter '" + std::string(name) + "'");
  std::string range(text.substr(eq + 1));
  std::replace(range.begin(), range.end(), ':', ',');
  std::vector<double> nums;
  for (auto piece : csv::split(range)) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (ec != std::errc{} || ptr != piece.data() + piece.size())
      throw ConfigError(std::string("grid.") + std::string(name), "bad number '" + std::string(piece) + "'");
    nums.push_back(v);
  }
  if (nums.size() != 3) throw ConfigError(std::string("grid.") + std::string(name), "expected lo:hi:step");
  axis.lo = nums[0];
  axis.hi = nums[1];
  axis.step = nums[2];
  axis.validate();
  return axis;
}

/// The grid used when none is given: context overlap from 0.1 to 0.9.
inline std::vector<GridAxis> default_sweep_grid() { return {GridAxis{SweepParam::rho, 0.1, 0.9, 0.2}}; }

inline constexpr std::size_t kDefaultReplicas = 100;

struct SweepBase {
  TaskConfig task;
  MonitorConfig monitor;
  RelevanceBoundary boundary;
};

struct SweepRow {
  std::size_t grid_point = 0;
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double kappa = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  double budget = 0.0;
  SessionStatus status = SessionStatus::completed;
  Nats terminal_effort = 0.0;
  double terminal_effect = 0.0;
  PathClass path_class = PathClass::HighRelevance;
  double relevance = 0.0;
  std::size_t imode_count = 0;
  std::size_t tu_count = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepSession {
  SweepRow row;
  RelevancePath path;
  SessionTrace trace;
};

/// Cartesian product of the axes, last axis fastest.
inline std::vector<std::vector<double>> grid_points(const std::vector<GridAxis>& grid) {
  std::vector<std::vector<double>> points{{}};
  for (const GridAxis& axis : grid) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : points)
      for (double v : axis.values()) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    points = std::move(next);
  }
  return points;
}

inline SweepBase apply_point(SweepBase base, const std::vector<GridAxis>& grid, const std::vector<double>& values) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    switch (grid[i].param) {
      case SweepParam::rho: base.task.context_overlap = values[i]; break;
      case SweepParam::kappa: base.monitor.habit_strength = values[i]; break;
      case SweepParam::theta: base.monitor.theta = values[i]; break;
      case SweepParam::gamma: base.monitor.precision = values[i]; break;
      case SweepParam::budget: base.monitor.effort_budget = values[i]; break;
    }
  }
  return base;
}

/// Runs `replicas` sessions per grid point. Replica r uses the same derived
/// seed at every grid point (common random numbers), and rows come back
/// ordered by (grid point, replica) whatever the completion order.
inline std::vector<SweepSession> field_sweep_sessions(const SweepBase& base, const std::vector<GridAxis>& grid,
                                                      std::size_t replicas, std::uint64_t master_seed,
                                                      unsigned workers = 0) {
  if (grid.empty()) throw ConfigError("grid", "must name at least one axis");
  if (replicas < 1) throw ConfigError("replicas", "must be >= 1");
  const auto points = grid_points(grid);
  std::vector<SweepBase> configs;
  configs.reserve(points.size());
  for (const auto& p : points) {
    SweepBase b = apply_point(base, grid, p);
    b.task.validate();
    b.monitor.validate();
    b.boundary.validate();
    configs.push_back(std::move(b));
  }

  std::vector<SweepSession> out(points.size() * replicas);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t job = next++; job < out.size(); job = next++) {
      const std::size_t point = job / replicas;
      const std::size_t replica = job % replicas;
      const SweepBase& cfg = configs[point];
      const std::uint64_t seed = derive_seed(master_seed, replica);
      TaskConfig task_cfg = cfg.task;
      task_cfg.seed = seed;
      const TranslationTask task = build_task(task_cfg, cfg.monitor.habit_strength);

      SweepSession& s = out[job];
      s.trace = run_session(task, cfg.monitor, derive_seed(seed, 1));
      s.path = trace_path(s.trace);
      SweepRow& row = s.row;
      row.grid_point = point;
      row.replica = replica;
      row.seed = seed;
      row.rho = cfg.task.context_overlap;
      row.kappa = cfg.monitor.habit_strength;
      row.theta = cfg.monitor.theta;
      row.gamma = cfg.monitor.precision;
      row.budget = cfg.monitor.effort_budget;
      row.status = s.trace.status;
      row.terminal_effort = s.path.terminal().effort;
      row.terminal_effect = s.path.terminal().effect;
      row.path_class = classify_path(s.path, cfg.boundary);
      row.relevance = session_relevance(s.trace);
      row.imode_count = s.trace.totals.imode_triggers;
      row.tu_count = s.trace.records.size();
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers ? workers : std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(out.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return out;
}

inline std::vector<SweepRow> field_sweep(const SweepBase& base, const std::vector<GridAxis>& grid, std::size_t replicas,
                                         std::uint64_t master_seed) {
  std::vector<SweepRow> rows;
  for (auto& s : field_sweep_sessions(base, grid, replicas, master_seed)) rows.push_back(s.row);
  return rows;
}

inline constexpr std::string_view kSweepHeader =
    "grid_point,replica,seed,rho,kappa,theta,gamma,budget,status,terminal_effort,terminal_effect,class,relevance,"
    "imode_count,tu_count";

inline void write_sweep_table(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.grid_point << ',' << r.replica << ',' << r.seed << ',' << csv::format(r.rho) << ','
        << csv::format(r.kappa) << ',' << csv::format(r.theta) << ',' << csv::format(r.gamma) << ','
        << csv::format(r.budget) << ',' << to_string(r.status) << ',' << csv::format(r.terminal_effort) << ','
        << csv::format(r.terminal_effect) << ',' << to_string(r.path_class) << ',' << csv::format(r.relevance) << ','
        << r.imode_count << ',' << r.tu_count << '\n';
  }
}

inline std::vector<SweepRow> read_sweep_table(std::istream& in) {
  std::vector<SweepRow> rows;
  csv::read(in, kSweepHeader, [&](const std::vector<std::string_view>& f, std::size_t line) {
    SweepRow r;
    r.grid_point = csv::parse<std::size_t>(f[0], line, "grid_point");
    r.replica = csv::parse<std::size_t>(f[1], line, "replica");
    r.seed = csv::parse<std::uint64_t>(f[2], line, "seed");
    r.rho = csv::parse<double>(f[3], line, "rho");
    r.kappa = csv::parse<double>(f[4], line, "kappa");
    r.theta = csv::parse<double>(f[5], line, "theta");
    r.gamma = csv::parse<double>(f[6], line, "gamma");
    r.budget = csv::parse<double>(f[7], line, "budget");
    if (f[8] != "completed" && f[8] != "abandoned") throw csv::ParseError(line, "bad status");
    r.status = f[8] == "completed" ? SessionStatus::completed : SessionStatus::abandoned;
    r.terminal_effort = csv::parse<double>(f[9], line, "terminal_effort");
    r.terminal_effect = csv::parse<double>(f[10], line, "terminal_effect");
    try {
      r.path_class = path_class_from_string(f[11]);
    } catch (const std::invalid_argument& e) {
      throw csv::ParseError(line, e.what());
    }
    r.relevance = csv::parse<double>(f[12], line, "relevance");
    r.imode_count = csv::parse<std::size_t>(f[13], line, "imode_count");
    r.tu_count = csv::parse<std::size_t>(f[14], line, "tu_count");
    rows.push_back(r);
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Analysis

/// Return on effort over effort terciles of effortful-success sessions.
struct TercileReturns {
  std::size_t sessions = 0;
  double mean_effort[3] = {};
  double mean_effect[3] = {};
  double pooled_ratio[3] = {};  ///< sum effect / sum effort within the tercile
  double marginal[3] = {};      ///< slope between consecutive tercile means (origin first)
};

inline TercileReturns tercile_returns(const std::vector<SweepRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const SweepRow& r : rows)
    if (r.path_class == PathClass::EffortfulSuccess) pts.emplace_back(r.terminal_effort, r.terminal_effect);
  std::sort(pts.begin(), pts.end());
  TercileReturns out;
  out.sessions = pts.size();
  if (pts.size() < 3) return out;
  double prev_effort = 0.0, prev_effect = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t a = k * pts.size() / 3, b = (k + 1) * pts.size() / 3;
    double effort = 0.0, effect = 0.0;
    for (std::size_t i = a; i < b; ++i) {
      effort += pts[i].first;
      effect += pts[i].second;
    }
    const auto n = static_cast<double>(b - a);
    out.pooled_ratio[k] = effect / effort;
    out.mean_effort[k] = effort / n;
    out.mean_effect[k] = effect / n;
    out.marginal[k] = (out.mean_effect[k] - prev_effect) / (out.mean_effort[k] - prev_effort);
    prev_effort = out.mean_effort[k];
    prev_effect = out.mean_effect[k];
  }
  return out;
}

}  // namespace tpsim
