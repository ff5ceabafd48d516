#pragma once

/**
 * @file config.hpp
 * @brief Run configuration: one JSON document, strict keys, central defaults.
 *
 * Defaults (an empty document yields exactly these):
 *
 * | key                            | default | meaning                                  |
 * |--------------------------------|---------|------------------------------------------|
 * | task.lexicon_size              | 4       | source token types                       |
 * | task.senses_per_token          | 1       | senses of each ambiguous token           |
 * | task.ambiguous_tokens          | all     | entries 0..n-1 are ambiguous             |
 * | task.blocked_tokens            | 0       | entries 0..n-1 have no adequate target   |
 * | task.cue_reliability           | 0.9     | P(cue names the latent sense)            |
 * | task.context_overlap           | 0.95    | rho, P(primed default is adequate)       |
 * | task.feedback_determinism      | 0.95    | sharpness of adequacy feedback           |
 * | task.source_length             | 16      | positions in the source text             |
 * | task.seed                      | 42      | ground-truth text seed                   |
 * | task.preference_adequate       | 0.99    | C = [p, 1 - p]                           |
 * | task.allow_unbounded_effect    | false   | accept zero-mass preferences             |
 * | monitor.theta                  | 1.5     | trigger threshold (nats)                 |
 * | monitor.habit_strength         | 0.95    | kappa, habit mass on the default         |
 * | monitor.precision              | 4.0     | gamma                                    |
 * | monitor.effort_budget          | 25      | abandonment threshold (nats)             |
 * | monitor.imode_max_iterations   | 3       | repairs per unit                         |
 * | monitor.base_imode_ticks       | 2       | ticks of an effortless repair            |
 * | monitor.ticks_per_nat          | 1.0     | extra ticks per nat of effort            |
 * | monitor.deterministic_actions  | false   | argmax instead of sampling               |
 * | monitor.check_adequacy         | false   | monitor also reads draft feedback        |
 * | timing.smode_iki_ms            | 150     | inter-keystroke interval                 |
 * | timing.imode_pause_base_ms     | 1200    | minimum i-mode pause                     |
 * | timing.ms_per_nat              | 400     | pause growth per nat of effort           |
 * | timing.fixation_ms             | 250     | duration of one fixation                 |
 * | timing.jitter_fraction         | 0.1     | relative timing noise                    |
 * | timing.keystrokes_per_target   | 6       | keystrokes per emitted target            |
 * | boundary.e_max                 | 10      | acceptable effort (nats)                 |
 * | boundary.f_min                 | 2.0     | worthwhile effect                        |
 * | boundary.curve                 | default | [[effort, effect], ...]                  |
 * | output_dir                     | "out"   |                                          |
 * | master_seed                    | 1       | session seed                             |
 */

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tpsim/agent.hpp"
#include "tpsim/error.hpp"
#include "tpsim/field.hpp"
#include "tpsim/serialize.hpp"
#include "tpsim/tu_stream.hpp"
#include "tpsim/world.hpp"

namespace tpsim {

struct RunConfig {
  TaskConfig task;
  MonitorConfig monitor;
  TimingModel timing;
  RelevanceBoundary boundary;
  std::string output_dir = "out";
  std::uint64_t master_seed = 1;

  void validate() const {
    task.validate();
    monitor.validate();
    timing.validate();
    boundary.validate();
  }

  [[nodiscard]] SweepBase sweep_base() const { return {task, monitor, boundary}; }
};

namespace detail {

using nlohmann::json;
using FieldReader = std::function<void(const json&, const std::string&)>;

inline void read_object(const json& doc, const std::string& path, const std::map<std::string, FieldReader>& fields) {
  if (!doc.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(where, "unknown key '" + key + "'");
    it->second(value, where);
  }
}

template <typename T>
FieldReader number_into(T& target) {
  return [&target](const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
      target = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError(where, "expected a non-negative integer");
      target = v.get<T>();
    } else {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
      target = v.get<T>();
    }
  };
}

}  // namespace detail

/// Parses a JSON run configuration. Empty text means all defaults. Unknown
/// keys, type mismatches and invariant violations throw ConfigError naming
/// the field path.
inline RunConfig parse_config(std::string_view text) {
  using detail::json;
  using detail::number_into;
  RunConfig cfg;

  const bool blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
  json doc = json::object();
  if (!blank) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("<document>", std::string("syntax error: ") + e.what());
    }
  }

  TaskConfig& t = cfg.task;
  MonitorConfig& m = cfg.monitor;
  TimingModel& tm = cfg.timing;
  RelevanceBoundary& b = cfg.boundary;

  detail::read_object(
      doc, "",
      {{"task",
        [&](const json& v, const std::string& p) {
          detail::read_object(v, p,
                              {{"lexicon_size", number_into(t.lexicon_size)},
                               {"senses_per_token", number_into(t.senses_per_token)},
                               {"ambiguous_tokens",
                                [&](const json& x, const std::string& w) {
                                  std::size_t n = 0;
                                  number_into(n)(x, w);
                                  t.ambiguous_tokens = n;
                                }},
                               {"blocked_tokens", number_into(t.blocked_tokens)},
                               {"cue_reliability", number_into(t.cue_reliability)},
                               {"context_overlap", number_into(t.context_overlap)},
                               {"feedback_determinism", number_into(t.feedback_determinism)},
                               {"source_length", number_into(t.source_length)},
                               {"seed", number_into(t.seed)},
                               {"preference_adequate", number_into(t.preference_adequate)},
                               {"allow_unbounded_effect", number_into(t.allow_unbounded_effect)}});
        }},
       {"monitor",
        [&](const json& v, const std::string& p) {
          detail::read_object(v, p,
                              {{"theta", number_into(m.theta)},
                               {"habit_strength", number_into(m.habit_strength)},
                               {"precision", number_into(m.precision)},
                               {"effort_budget", number_into(m.effort_budget)},
                               {"imode_max_iterations", number_into(m.imode_max_iterations)},
                               {"base_imode_ticks", number_into(m.base_imode_ticks)},
                               {"ticks_per_nat", number_into(m.ticks_per_nat)},
                               {"deterministic_actions", number_into(m.deterministic_actions)},
                               {"check_adequacy", number_into(m.check_adequacy)}});
        }},
       {"timing",
        [&](const json& v, const std::string& p) {
          detail::read_object(v, p,
                              {{"smode_iki_ms", number_into(tm.smode_iki_ms)},
                               {"imode_pause_base_ms", number_into(tm.imode_pause_base_ms)},
                               {"ms_per_nat", number_into(tm.ms_per_nat)},
                               {"fixation_ms", number_into(tm.fixation_ms)},
                               {"jitter_fraction", number_into(tm.jitter_fraction)},
                               {"keystrokes_per_target", number_into(tm.keystrokes_per_target)}});
        }},
       {"boundary",
        [&](const json& v, const std::string& p) {
          detail::read_object(v, p,
                              {{"e_max", number_into(b.e_max)},
                               {"f_min", number_into(b.f_min)},
                               {"curve", [&](const json& x, const std::string& w) {
                                  if (!x.is_array()) throw ConfigError(w, "expected [[effort, effect], ...]");
                                  b.curve.clear();
                                  for (const auto& pt : x) {
                                    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
                                      throw ConfigError(w, "expected [[effort, effect], ...]");
                                    b.curve.emplace_back(pt[0].get<double>(), pt[1].get<double>());
                                  }
                                }}});
        }},
       {"output_dir",
        [&](const json& v, const std::string& p) {
          if (!v.is_string()) throw ConfigError(p, "expected a string");
          cfg.output_dir = v.get<std::string>();
        }},
       {"master_seed", number_into(cfg.master_seed)}});

  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& [e, f] : cfg.boundary.curve_points()) curve.push_back({e, f});
  const MonitorConfig& m = cfg.monitor;
  const TimingModel& tm = cfg.timing;
  return {{"task", json::to_json(cfg.task)},
          {"monitor",
           {{"theta", m.theta},
            {"habit_strength", m.habit_strength},
            {"precision", m.precision},
            {"effort_budget", m.effort_budget},
            {"imode_max_iterations", m.imode_max_iterations},
            {"base_imode_ticks", m.base_imode_ticks},
            {"ticks_per_nat", m.ticks_per_nat},
            {"deterministic_actions", m.deterministic_actions},
            {"check_adequacy", m.check_adequacy}}},
          {"timing",
           {{"smode_iki_ms", tm.smode_iki_ms},
            {"imode_pause_base_ms", tm.imode_pause_base_ms},
            {"ms_per_nat", tm.ms_per_nat},
            {"fixation_ms", tm.fixation_ms},
            {"jitter_fraction", tm.jitter_fraction},
            {"keystrokes_per_target", tm.keystrokes_per_target}}},
          {"boundary", {{"e_max", cfg.boundary.e_max}, {"f_min", cfg.boundary.f_min}, {"curve", curve}}},
          {"output_dir", cfg.output_dir},
          {"master_seed", cfg.master_seed}};
}

}  // namespace tpsim
