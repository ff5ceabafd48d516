#pragma once

// JSON documents for tasks, traces and relevance paths. Non-finite numbers
// are written as the strings "inf" / "-inf" because JSON has no literal for
// them.

#include <cmath>
#include <string>

#include "json.hpp"
#include "tpsim/agent.hpp"
#include "tpsim/field.hpp"
#include "tpsim/world.hpp"

namespace tpsim::json {

using nlohmann::json;

inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json to_json(const Categorical& c) {
  json out = json::array();
  for (double p : c) out.push_back(p);
  return out;
}

inline json to_json(const TaskConfig& c) {
  json out{{"lexicon_size", c.lexicon_size},
           {"senses_per_token", c.senses_per_token},
           {"blocked_tokens", c.blocked_tokens},
           {"cue_reliability", c.cue_reliability},
           {"context_overlap", c.context_overlap},
           {"feedback_determinism", c.feedback_determinism},
           {"source_length", c.source_length},
           {"seed", c.seed},
           {"preference_adequate", c.preference_adequate},
           {"allow_unbounded_effect", c.allow_unbounded_effect}};
  if (c.ambiguous_tokens) out["ambiguous_tokens"] = *c.ambiguous_tokens;
  return out;
}

inline json to_json(const TranslationTask& task) {
  json lexicon = json::array();
  for (const LexiconEntry& e : task.lexicon) {
    json cue_likelihood = json::array();
    for (std::size_t s = 0; s < e.sense_count(); ++s) cue_likelihood.push_back(to_json(e.senses.column(s)));
    lexicon.push_back({{"sense_prior", to_json(e.senses.prior())},
                       {"cue_likelihood", cue_likelihood},
                       {"habit", to_json(e.habit)},
                       {"default_target", e.default_target},
                       {"adequacy", e.adequacy},
                       {"believed_adequacy", e.believed_adequacy},
                       {"ambiguous", e.ambiguous},
                       {"blocked", e.blocked}});
  }
  json source = json::array();
  for (const SourcePosition& p : task.source) source.push_back({{"token", p.token}, {"latent_sense", p.latent_sense}});
  return {{"config", to_json(task.config)},
          {"habit_strength", task.habit_strength},
          {"preferences", to_json(task.preferences)},
          {"lexicon", lexicon},
          {"source", source}};
}

inline json to_json(const TuRecord& r) {
  return {{"index", r.index},
          {"position", r.position},
          {"token", r.token},
          {"cue", r.cue},
          {"mode", to_string(r.mode)},
          {"iteration", r.iteration},
          {"action", r.action},
          {"f", number(r.f)},
          {"f_adequacy", number(r.f_adequacy)},
          {"effort_e1", number(r.effort_e1)},
          {"effort_e2", number(r.effort_e2)},
          {"effect", number(r.effect)},
          {"feedback", to_string(r.feedback)},
          {"fast_ticks", r.fast_ticks},
          {"g_spread", number(r.g_spread)}};
}

inline json to_json(const SessionTrace& trace) {
  json records = json::array();
  for (const TuRecord& r : trace.records) records.push_back(to_json(r));
  return {{"status", to_string(trace.status)},
          {"totals",
           {{"effort", number(trace.totals.effort)},
            {"effect", number(trace.totals.effect)},
            {"free_energy", number(trace.totals.free_energy)},
            {"imode_triggers", trace.totals.imode_triggers}}},
          {"records", records}};
}

inline json to_json(const RelevancePath& path) {
  json points = json::array();
  for (const PathPoint& p : path.points)
    points.push_back({{"effort", number(p.effort)}, {"effect", number(p.effect)}, {"tick", p.tick}});
  return {{"terminal_status", to_string(path.terminal_status)}, {"points", points}};
}

/// The session document written by `run`.
inline json session_document(const std::string& session_id, std::uint64_t master_seed, const TranslationTask& task,
                             const SessionTrace& trace, const RelevancePath& path, PathClass path_class) {
  return {{"session_id", session_id},
          {"master_seed", master_seed},
          {"task", to_json(task)},
          {"trace", to_json(trace)},
          {"relevance_path", to_json(path)},
          {"class", to_string(path_class)},
          {"relevance", number(session_relevance(trace))}};
}

}  // namespace tpsim::json
