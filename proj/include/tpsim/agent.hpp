#pragma once

/**
 * @file agent.hpp
 * @brief The two-mode monitor agent.
 *
 * Every translation unit starts with a fast s-mode step: the primed default
 * target is emitted without touching beliefs, and the free energy of the
 * habit-congruent belief against the observed cue is recorded. A monitor
 * compares that free energy to a threshold; on a trigger the unit is repaired
 * by slow i-mode iterations that update beliefs exactly, score every target
 * by expected free energy and commit to a policy posterior shaped by habit
 * and precision. Cumulative effort above the budget abandons the session.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tpsim/belief.hpp"
#include "tpsim/error.hpp"
#include "tpsim/free_energy.hpp"
#include "tpsim/rng.hpp"
#include "tpsim/world.hpp"

namespace tpsim {

struct MonitorConfig {
  Nats theta = 1.5;                 ///< trigger threshold on per-unit free energy
  double habit_strength = kDefaultHabitStrength;
  double precision = 4.0;           ///< gamma
  Nats effort_budget = 25.0;
  std::size_t imode_max_iterations = 3;
  std::uint64_t base_imode_ticks = 2;
  double ticks_per_nat = 1.0;
  bool deterministic_actions = false;
  /// Also treat the surprise of draft feedback as a monitor signal.
  bool check_adequacy = false;

  void validate() const {
    if (std::isnan(theta)) throw ConfigError("monitor.theta", "must be a number");
    if (!(habit_strength > 0.0 && habit_strength <= 1.0))
      throw ConfigError("monitor.habit_strength", "must lie in (0, 1]");
    if (!(precision >= 0.0) || std::isinf(precision)) throw ConfigError("monitor.precision", "must be finite and >= 0");
    if (!(effort_budget > 0.0)) throw ConfigError("monitor.effort_budget", "must be > 0");
    if (imode_max_iterations < 1) throw ConfigError("monitor.imode_max_iterations", "must be >= 1");
    if (base_imode_ticks < 2) throw ConfigError("monitor.base_imode_ticks", "must exceed the single s-mode tick");
    if (!(ticks_per_nat >= 0.0) || std::isinf(ticks_per_nat))
      throw ConfigError("monitor.ticks_per_nat", "must be finite and >= 0");
  }
};

enum class Mode { smode, imode };

inline const char* to_string(Mode m) noexcept { return m == Mode::smode ? "smode" : "imode"; }

struct TuRecord {
  std::size_t index = 0;     ///< position in the trace
  std::size_t position = 0;  ///< source position
  std::size_t token = 0;
  std::size_t cue = 0;
  Mode mode = Mode::smode;
  std::size_t iteration = 0;  ///< 0 for the draft, 1.. for repairs
  std::size_t action = 0;
  Nats f = 0.0;
  Nats f_adequacy = 0.0;  ///< surprise of the feedback under the acting belief
  Nats effort_e1 = 0.0;
  Nats effort_e2 = 0.0;
  double effect = 0.0;
  FeedbackObs feedback = FeedbackObs::adequate;
  std::uint64_t fast_ticks = 0;
  Nats g_spread = 0.0;  ///< max - min expected free energy over candidates

  [[nodiscard]] Nats effort() const noexcept { return effort_e1 + effort_e2; }
};

enum class SessionStatus { completed, abandoned };

inline const char* to_string(SessionStatus s) noexcept {
  return s == SessionStatus::completed ? "completed" : "abandoned";
}

struct SessionTotals {
  Nats effort = 0.0;
  double effect = 0.0;
  Nats free_energy = 0.0;
  std::size_t imode_triggers = 0;
};

struct SessionTrace {
  std::vector<TuRecord> records;
  SessionStatus status = SessionStatus::completed;
  SessionTotals totals;
};

enum class MonitorDecision { Continue, TriggerImode, Abandon };

inline MonitorDecision monitor_check(Nats f, Nats cumulative_effort, const MonitorConfig& config) {
  if (cumulative_effort > config.effort_budget) return MonitorDecision::Abandon;
  if (f > config.theta) return MonitorDecision::TriggerImode;
  return MonitorDecision::Continue;
}

/// Working state of one translation unit across its draft and repairs.
struct UnitState {
  std::size_t position = 0;
  Observation observation;
  std::optional<Categorical> belief;  ///< sense belief after the last repair
  std::size_t current_target = 0;
  FeedbackObs last_feedback = FeedbackObs::adequate;
  std::size_t iterations = 0;
  double best_effect = 0.0;
};

namespace detail {

/// Credit only improvements over the best effect already realized in this
/// unit, so a repair never double-counts the draft.
inline double credit_effect(UnitState& state, double realized) {
  const double credited = std::max(0.0, realized - state.best_effect);
  state.best_effect = std::max(state.best_effect, realized);
  return credited;
}

inline std::uint64_t imode_ticks(const MonitorConfig& config, Nats effort) {
  const double extra = std::ceil(config.ticks_per_nat * effort);
  constexpr double cap = 1e12;
  return config.base_imode_ticks + static_cast<std::uint64_t>(std::isfinite(extra) ? std::min(extra, cap) : cap);
}

/// -E_q[ln P(feedback | sense, target)] under the translator's model.
inline Nats feedback_free_energy(const TranslationTask& task, std::size_t token, const Categorical& belief,
                                 std::size_t target, FeedbackObs feedback) {
  const DiscreteModel model(belief, task.believed_feedback_columns(token, target));
  return variational_free_energy(belief, model, index_of(feedback)).total_f;
}

}  // namespace detail

/// Outcome model for repairing one unit: hidden state (sense, emitted target),
/// observations {adequate, inadequate}, and one transition per candidate that
/// overwrites the emitted target.
struct RepairModel {
  DiscreteModel model;
  std::vector<TransitionMap> transitions;
};

inline RepairModel repair_model(const TranslationTask& task, std::size_t token, const Categorical& sense_belief,
                                std::size_t draft_target) {
  const LexiconEntry& entry = task.lexicon.at(token);
  const std::size_t senses = entry.sense_count();
  const std::size_t targets = entry.candidate_count();
  const std::size_t joint = senses * targets;

  std::vector<double> prior(joint, 0.0);
  std::vector<Categorical> columns;
  columns.reserve(joint);
  for (std::size_t s = 0; s < senses; ++s) {
    prior[s * targets + draft_target] = sense_belief[s];
    for (std::size_t j = 0; j < targets; ++j) {
      const double p = task.feedback_probability(entry.believed_adequacy[s][j]);
      columns.push_back(Categorical{p, 1.0 - p});
    }
  }

  std::vector<TransitionMap> transitions(targets);
  for (std::size_t a = 0; a < targets; ++a) {
    transitions[a].reserve(joint);
    for (std::size_t x = 0; x < joint; ++x) transitions[a].push_back(Categorical::one_hot(joint, (x / targets) * targets + a));
  }
  return {DiscreteModel(normalize(prior), std::move(columns)), std::move(transitions)};
}

inline TuRecord step_smode(const TranslationTask& task, UnitState& state, const MonitorConfig& config,
                           RngStream& rng) {
  const std::size_t t = state.position;
  const LexiconEntry& entry = task.entry_at(t);
  if (entry.candidate_count() == 0) throw std::invalid_argument("step_smode: token has no target candidates");

  TuRecord rec;
  rec.position = t;
  rec.token = state.observation.token;
  rec.cue = state.observation.cue;
  rec.mode = Mode::smode;

  const Categorical belief = task.habit_congruent_belief(rec.token);
  rec.f = variational_free_energy(belief, entry.senses, rec.cue).total_f;
  rec.action = argmax(entry.habit);
  rec.feedback = emit_feedback(task, t, rec.action, rng);
  rec.f_adequacy = detail::feedback_free_energy(task, rec.token, belief, rec.action, rec.feedback);
  rec.effect = detail::credit_effect(state, effect_of(rec.feedback, task.preferences));
  rec.fast_ticks = 1;
  (void)config;

  state.current_target = rec.action;
  state.last_feedback = rec.feedback;
  return rec;
}

inline TuRecord step_imode(const TranslationTask& task, UnitState& state, const MonitorConfig& config,
                           RngStream& rng) {
  const std::size_t t = state.position;
  const LexiconEntry& entry = task.entry_at(t);

  TuRecord rec;
  rec.position = t;
  rec.token = state.observation.token;
  rec.cue = state.observation.cue;
  rec.mode = Mode::imode;
  rec.iteration = state.iterations + 1;

  // The first repair explains the cue from the sense prior; later repairs
  // explain the feedback that the previous repair received.
  const Categorical before = state.belief ? *state.belief : entry.senses.prior();
  const PosteriorResult post =
      state.belief ? exact_posterior(DiscreteModel(before, task.believed_feedback_columns(rec.token, state.current_target)),
                                     index_of(state.last_feedback))
                   : exact_posterior(entry.senses, rec.cue);

  auto give_up = [&] {
    rec.effort_e2 = kInf;
    rec.f = kInf;
    rec.action = state.current_target;
    rec.feedback = state.last_feedback;
    rec.fast_ticks = detail::imode_ticks(config, kInf);
    ++state.iterations;
    return rec;
  };

  if (post.impossible()) {
    rec.effort_e1 = kInf;
    return give_up();
  }
  const Categorical& belief = *post.posterior;
  rec.effort_e1 = belief_update_effort(before, belief);

  const RepairModel repair = repair_model(task, rec.token, belief, state.current_target);
  std::vector<PolicyScore> scores;
  scores.reserve(entry.candidate_count());
  for (std::size_t j = 0; j < entry.candidate_count(); ++j)
    scores.push_back(
        expected_free_energy(repair.model, repair.model.prior(), Policy({j}), task.preferences, repair.transitions));
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end(),
                                            [](const PolicyScore& a, const PolicyScore& b) { return a.g < b.g; });
  rec.g_spread = hi->g - lo->g;

  const std::optional<Categorical> q_pi = policy_posterior(entry.habit, scores, config.precision);
  if (!q_pi) return give_up();

  rec.action = config.deterministic_actions ? argmax(*q_pi) : sample_categorical(*q_pi, rng);
  rec.effort_e2 = behavior_effort(*q_pi, entry.habit);
  rec.feedback = emit_feedback(task, t, rec.action, rng);
  rec.f = detail::feedback_free_energy(task, rec.token, belief, rec.action, rec.feedback);
  rec.f_adequacy = rec.f;
  rec.effect = detail::credit_effect(state, effect_of(rec.feedback, task.preferences));
  rec.fast_ticks = detail::imode_ticks(config, rec.effort());

  state.belief = belief;
  state.current_target = rec.action;
  state.last_feedback = rec.feedback;
  ++state.iterations;
  return rec;
}

inline SessionTrace run_session(const TranslationTask& task, const MonitorConfig& config, std::uint64_t master_seed) {
  config.validate();
  const RngStream session = RngStream(master_seed).split(stream_tag::kSession);
  const RngStream units = session.split(stream_tag::kUnit);

  SessionTrace trace;
  auto append = [&](TuRecord rec) {
    rec.index = trace.records.size();
    trace.totals.effort += rec.effort();
    trace.totals.effect += rec.effect;
    trace.totals.free_energy += rec.f;
    if (rec.mode == Mode::imode) ++trace.totals.imode_triggers;
    trace.records.push_back(rec);
    return rec;
  };
  auto statistic = [&](const TuRecord& rec) {
    return config.check_adequacy ? std::max(rec.f, rec.f_adequacy) : rec.f;
  };

  for (std::size_t t = 0; t < task.source.size(); ++t) {
    UnitState state;
    state.position = t;
    state.observation = observe(task, t, session);
    RngStream rng = units.split(t);

    TuRecord rec = append(step_smode(task, state, config, rng));
    MonitorDecision decision = monitor_check(statistic(rec), trace.totals.effort, config);
    while (decision == MonitorDecision::TriggerImode && state.iterations < config.imode_max_iterations) {
      rec = append(step_imode(task, state, config, rng));
      decision = monitor_check(statistic(rec), trace.totals.effort, config);
    }
    if (decision == MonitorDecision::Abandon) {
      trace.status = SessionStatus::abandoned;
      break;
    }
  }
  return trace;
}

/// Session-level relevance, the negated sum of per-unit free energy.
inline double session_relevance(const SessionTrace& trace) { return 0.0 - trace.totals.free_energy; }

}  // namespace tpsim
