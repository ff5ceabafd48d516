#pragma once

/**
 * @file world.hpp
 * @brief Toy translation tasks as discrete generative models.
 *
 * Each lexicon entry is a source token with one or more hidden senses. Target
 * candidate j is the canonical rendering of sense j; candidate 0 is the
 * primed default equivalent and renders the habitual sense 0. The context
 * overlap rho is the prior mass of the habitual sense on ambiguous tokens, so
 * rho is exactly the probability that the default equivalent is adequate.
 *
 * The translator's generative model (sense prior D, cue likelihood A, habit E,
 * believed adequacy) is stored next to the ground truth (latent senses and
 * actual adequacy). They differ only on blocked tokens, for which no target
 * is actually adequate.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpsim/belief.hpp"
#include "tpsim/error.hpp"
#include "tpsim/free_energy.hpp"
#include "tpsim/rng.hpp"

namespace tpsim {

namespace stream_tag {
inline constexpr std::uint64_t kLatent = 0x4c41'54454e54ULL;
inline constexpr std::uint64_t kCue = 0x4355'45ULL;
inline constexpr std::uint64_t kUnit = 0x554e'4954ULL;
inline constexpr std::uint64_t kEvents = 0x4556'454e'5453ULL;
inline constexpr std::uint64_t kSession = 0x5345'5353ULL;
}  // namespace stream_tag

inline constexpr double kDefaultHabitStrength = 0.95;

struct TaskConfig {
  std::size_t lexicon_size = 4;
  std::size_t senses_per_token = 1;
  /// Lexicon entries 0..n-1 carry `senses_per_token` senses, the rest one.
  /// Empty means every entry.
  std::optional<std::size_t> ambiguous_tokens;
  /// Lexicon entries 0..n-1 have no actually adequate target.
  std::size_t blocked_tokens = 0;
  double cue_reliability = 0.9;
  double context_overlap = 0.95;
  double feedback_determinism = 0.95;
  std::size_t source_length = 16;
  std::uint64_t seed = 42;
  /// Preference mass on adequate feedback; C = [p, 1 - p].
  double preference_adequate = 0.99;
  bool allow_unbounded_effect = false;

  [[nodiscard]] std::size_t ambiguous_count() const {
    return ambiguous_tokens.value_or(lexicon_size);
  }

  void validate() const {
    auto probability = [](const char* field, double v) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("task.") + field, "must lie in [0, 1]");
    };
    if (lexicon_size < 1) throw ConfigError("task.lexicon_size", "must be >= 1");
    if (senses_per_token < 1) throw ConfigError("task.senses_per_token", "must be >= 1");
    if (source_length < 1) throw ConfigError("task.source_length", "must be >= 1");
    if (ambiguous_tokens && *ambiguous_tokens > lexicon_size)
      throw ConfigError("task.ambiguous_tokens", "exceeds lexicon_size");
    if (blocked_tokens > lexicon_size) throw ConfigError("task.blocked_tokens", "exceeds lexicon_size");
    probability("cue_reliability", cue_reliability);
    probability("context_overlap", context_overlap);
    probability("feedback_determinism", feedback_determinism);
    probability("preference_adequate", preference_adequate);
    if (!allow_unbounded_effect && (preference_adequate == 0.0 || preference_adequate == 1.0))
      throw ConfigError("task.preference_adequate", "zero-mass preferences give unbounded effects");
  }
};

enum class FeedbackObs : std::size_t { adequate = 0, inadequate = 1 };

inline constexpr std::size_t index_of(FeedbackObs f) noexcept { return static_cast<std::size_t>(f); }

inline const char* to_string(FeedbackObs f) noexcept {
  return f == FeedbackObs::adequate ? "adequate" : "inadequate";
}

struct LexiconEntry {
  DiscreteModel senses;  ///< prior D over senses, cue likelihood A
  Categorical habit;     ///< E over target candidates
  std::size_t default_target = 0;
  std::vector<std::vector<double>> adequacy;           ///< [sense][target], ground truth
  std::vector<std::vector<double>> believed_adequacy;  ///< [sense][target], translator's model
  bool ambiguous = false;
  bool blocked = false;

  [[nodiscard]] std::size_t sense_count() const noexcept { return senses.states(); }
  [[nodiscard]] std::size_t candidate_count() const noexcept { return habit.size(); }
};

struct SourcePosition {
  std::size_t token = 0;
  std::size_t latent_sense = 0;
};

struct Observation {
  std::size_t token = 0;
  std::size_t cue = 0;
};

struct TranslationTask {
  TaskConfig config;
  double habit_strength = kDefaultHabitStrength;
  std::vector<LexiconEntry> lexicon;
  std::vector<SourcePosition> source;
  Categorical preferences{0.99, 0.01};  ///< C over {adequate, inadequate}

  [[nodiscard]] const LexiconEntry& entry_at(std::size_t t) const {
    if (t >= source.size()) throw std::out_of_range("task: position " + std::to_string(t) + " out of range");
    return lexicon.at(source[t].token);
  }

  /// P(feedback = adequate) for an adequacy value, pulled toward 1/2 as
  /// feedback determinism drops.
  [[nodiscard]] double feedback_probability(double adequacy) const noexcept {
    return 0.5 + config.feedback_determinism * (adequacy - 0.5);
  }

  /// Belief over senses consistent with the primed default: habit mass on
  /// the habitual sense, the remainder spread uniformly.
  [[nodiscard]] Categorical habit_congruent_belief(std::size_t token) const {
    return concentrated(lexicon.at(token).sense_count(), habit_strength);
  }

  /// The translator's likelihood of feedback given (sense, emitted target),
  /// as one column per sense over {adequate, inadequate}.
  [[nodiscard]] std::vector<Categorical> believed_feedback_columns(std::size_t token, std::size_t target) const {
    const auto& e = lexicon.at(token);
    std::vector<Categorical> columns;
    columns.reserve(e.sense_count());
    for (std::size_t s = 0; s < e.sense_count(); ++s) {
      const double p = feedback_probability(e.believed_adequacy[s].at(target));
      columns.push_back(Categorical{p, 1.0 - p});
    }
    return columns;
  }

  static Categorical concentrated(std::size_t n, double mass) {
    if (n == 1) return Categorical{1.0};
    std::vector<double> p(n, (1.0 - mass) / static_cast<double>(n - 1));
    p[0] = mass;
    return Categorical(std::move(p));
  }
};

inline TranslationTask build_task(const TaskConfig& config, double habit_strength = kDefaultHabitStrength) {
  config.validate();
  if (!(habit_strength > 0.0 && habit_strength <= 1.0))
    throw ConfigError("monitor.habit_strength", "must lie in (0, 1]");

  TranslationTask task;
  task.config = config;
  task.habit_strength = habit_strength;
  task.preferences = Categorical{config.preference_adequate, 1.0 - config.preference_adequate};

  const std::size_t ambiguous = config.ambiguous_count();
  task.lexicon.reserve(config.lexicon_size);
  for (std::size_t k = 0; k < config.lexicon_size; ++k) {
    const std::size_t n = k < ambiguous ? config.senses_per_token : 1;
    Categorical prior = TranslationTask::concentrated(n, config.context_overlap);

    std::vector<Categorical> cue_columns;
    cue_columns.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
      if (n == 1) {
        cue_columns.push_back(Categorical{1.0});
        continue;
      }
      std::vector<double> column(n, (1.0 - config.cue_reliability) / static_cast<double>(n - 1));
      column[s] = config.cue_reliability;
      cue_columns.emplace_back(std::move(column));
    }

    std::vector<std::vector<double>> believed(n, std::vector<double>(n, 0.0));
    for (std::size_t s = 0; s < n; ++s) believed[s][s] = 1.0;
    const bool blocked = k < config.blocked_tokens;
    auto actual = blocked ? std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)) : believed;

    task.lexicon.push_back(LexiconEntry{
        .senses = DiscreteModel(std::move(prior), std::move(cue_columns)),
        .habit = TranslationTask::concentrated(n, habit_strength),
        .default_target = 0,
        .adequacy = std::move(actual),
        .believed_adequacy = std::move(believed),
        .ambiguous = n > 1,
        .blocked = blocked,
    });
  }

  // One uniform per position so that latent senses are coupled across
  // configurations sharing a seed.
  const RngStream latent = RngStream(config.seed).split(stream_tag::kLatent);
  task.source.reserve(config.source_length);
  for (std::size_t t = 0; t < config.source_length; ++t) {
    const std::size_t token = t % config.lexicon_size;
    RngStream draw = latent.split(t);
    const std::size_t sense = sample_categorical(task.lexicon[token].senses.prior(), draw);
    task.source.push_back({token, sense});
  }
  return task;
}

/// Scripted token at t plus a cue drawn from A given the latent sense. Pure in
/// (session stream, t): repeated calls return the same observation.
inline Observation observe(const TranslationTask& task, std::size_t t, const RngStream& session) {
  const LexiconEntry& entry = task.entry_at(t);
  RngStream draw = session.split(stream_tag::kCue).split(t);
  const std::size_t cue = sample_categorical(entry.senses.column(task.source[t].latent_sense), draw);
  return {task.source[t].token, cue};
}

inline FeedbackObs emit_feedback(const TranslationTask& task, std::size_t t, std::size_t target, RngStream& rng) {
  const LexiconEntry& entry = task.entry_at(t);
  if (target >= entry.candidate_count())
    throw std::out_of_range("emit_feedback: unknown target " + std::to_string(target));
  const double p = task.feedback_probability(entry.adequacy[task.source[t].latent_sense][target]);
  return rng.uniform() < p ? FeedbackObs::adequate : FeedbackObs::inadequate;
}

/// Shifted log-preference ln C(feedback) - ln C(inadequate): zero for the
/// dispreferred outcome, positive for the preferred one. Zero-mass
/// preferences yield an explicit infinite value.
inline double effect_of(FeedbackObs feedback, const Categorical& preferences) {
  if (preferences.size() != 2) throw std::invalid_argument("effect_of: preferences must cover {adequate, inadequate}");
  if (feedback == FeedbackObs::inadequate) return 0.0;
  const double adequate = preferences[index_of(FeedbackObs::adequate)];
  const double inadequate = preferences[index_of(FeedbackObs::inadequate)];
  if (adequate == 0.0) return -kInf;
  if (inadequate == 0.0) return kInf;
  return std::log(adequate) - std::log(inadequate);
}

}  // namespace tpsim
