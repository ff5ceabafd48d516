#pragma once

/**
 * @file free_energy.hpp
 * @brief Exact posteriors, variational free energy, expected free energy
 *        and policy posteriors over discrete generative models.
 *
 * Free energy is reported in both factorizations:
 *
 *   F[Q, y] = D_KL[Q(x) || P(x|y)] - ln P(y)          (divergence + evidence)
 *           = D_KL[Q(x) || P(x)]   - E_Q[ln P(y|x)]   (complexity - accuracy)
 *
 * and every report is checked for agreement of the two before it is returned.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpsim/belief.hpp"

namespace tpsim {

/// Prior over hidden states plus a likelihood P(y|x). The likelihood is held
/// column-wise: column x is the distribution over observations given state x.
class DiscreteModel {
 public:
  DiscreteModel(Categorical prior, std::vector<Categorical> likelihood)
      : prior_(std::move(prior)), likelihood_(std::move(likelihood)) {
    if (likelihood_.size() != prior_.size())
      throw std::invalid_argument("discrete model: one likelihood column per state required");
    for (const auto& column : likelihood_)
      if (column.size() != likelihood_.front().size())
        throw std::invalid_argument("discrete model: ragged likelihood columns");
  }

  /// Build from a row-major [observation][state] matrix.
  static DiscreteModel from_rows(Categorical prior, const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("discrete model: no observations");
    std::vector<Categorical> columns;
    columns.reserve(prior.size());
    for (std::size_t x = 0; x < prior.size(); ++x) {
      std::vector<double> column(rows.size());
      for (std::size_t y = 0; y < rows.size(); ++y) {
        if (rows[y].size() != prior.size())
          throw std::invalid_argument("discrete model: likelihood row " + std::to_string(y) +
                                      " has wrong width");
        column[y] = rows[y][x];
      }
      columns.emplace_back(std::move(column));
    }
    return DiscreteModel(std::move(prior), std::move(columns));
  }

  [[nodiscard]] std::size_t states() const noexcept { return prior_.size(); }
  [[nodiscard]] std::size_t observations() const noexcept { return likelihood_.front().size(); }
  [[nodiscard]] const Categorical& prior() const noexcept { return prior_; }
  [[nodiscard]] const Categorical& column(std::size_t x) const { return likelihood_.at(x); }
  [[nodiscard]] double likelihood(std::size_t y, std::size_t x) const { return likelihood_.at(x)[y]; }

 private:
  Categorical prior_;
  std::vector<Categorical> likelihood_;
};

/// Per-action state transitions: map[x] is the distribution of the next state
/// given the current state x.
using TransitionMap = std::vector<Categorical>;

struct PosteriorResult {
  std::optional<Categorical> posterior;  ///< empty when the observation is impossible
  double evidence = 0.0;                 ///< P(y)

  [[nodiscard]] bool impossible() const noexcept { return !posterior.has_value(); }
};

inline PosteriorResult exact_posterior(const DiscreteModel& model, std::size_t y) {
  if (y >= model.observations()) throw std::out_of_range("exact_posterior: observation index out of range");
  std::vector<double> joint(model.states());
  for (std::size_t x = 0; x < model.states(); ++x) joint[x] = model.likelihood(y, x) * model.prior()[x];
  const double evidence = std::accumulate(joint.begin(), joint.end(), 0.0);
  if (evidence <= 0.0) return {std::nullopt, 0.0};
  return {normalize(joint), std::min(evidence, 1.0)};
}

struct FreeEnergyReport {
  Nats divergence = 0.0;         ///< D_KL[Q(x) || P(x|y)]
  Nats evidence_surprise = 0.0;  ///< -ln P(y)
  Nats complexity = 0.0;         ///< D_KL[Q(x) || P(x)]
  double accuracy = 0.0;         ///< E_Q[ln P(y|x)], <= 0
  Nats total_f = 0.0;
  bool impossible_observation = false;
};

namespace detail {

inline bool agrees(double a, double b, double tolerance) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tolerance * std::max(1.0, std::abs(a));
}

}  // namespace detail

inline FreeEnergyReport variational_free_energy(const Categorical& q, const DiscreteModel& model,
                                                std::size_t y) {
  if (q.size() != model.states()) throw std::invalid_argument("variational_free_energy: q has wrong length");
  const PosteriorResult post = exact_posterior(model, y);

  FreeEnergyReport r;
  r.complexity = kl_divergence(q, model.prior());
  r.accuracy = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] == 0.0) continue;
    const double lik = model.likelihood(y, x);
    if (lik == 0.0) {
      r.accuracy = -kInf;
      break;
    }
    r.accuracy += q[x] * std::log(lik);
  }
  r.total_f = r.complexity - r.accuracy;

  if (post.impossible()) {
    // Every state is ruled out by either the prior or the likelihood, so
    // both factorizations diverge.
    r.impossible_observation = true;
    r.divergence = kInf;
    r.evidence_surprise = kInf;
  } else {
    r.divergence = kl_divergence(q, *post.posterior);
    r.evidence_surprise = surprise(post.evidence);
  }

  if (!detail::agrees(r.divergence + r.evidence_surprise, r.total_f, 1e-9))
    throw std::logic_error("variational_free_energy: factorizations disagree");
  return r;
}

/// Effort channel E1: how far beliefs moved, D_KL[posterior || prior].
inline Nats belief_update_effort(const Categorical& prior_q, const Categorical& posterior_q) {
  return kl_divergence(posterior_q, prior_q);
}

/// Effort channel E2: departure of the policy posterior from habit, D_KL[q(pi) || E].
inline Nats behavior_effort(const Categorical& policy_posterior, const Categorical& habit) {
  return kl_divergence(policy_posterior, habit);
}

class Policy {
 public:
  explicit Policy(std::vector<std::size_t> actions) : actions_(std::move(actions)) {
    if (actions_.empty()) throw std::invalid_argument("policy: horizon must be at least 1");
  }
  [[nodiscard]] std::size_t horizon() const noexcept { return actions_.size(); }
  [[nodiscard]] std::span<const std::size_t> actions() const noexcept { return actions_; }

 private:
  std::vector<std::size_t> actions_;
};

struct PolicyScore {
  Nats risk = 0.0;       ///< sum_t D_KL[predicted outcomes || preferences]
  Nats ambiguity = 0.0;  ///< sum_t E_states H[P(y|x)]
  Nats g = 0.0;
};

namespace detail {

inline Categorical propagate(const Categorical& belief, const TransitionMap& map) {
  std::vector<double> next(map.front().size(), 0.0);
  for (std::size_t x = 0; x < belief.size(); ++x)
    for (std::size_t x2 = 0; x2 < next.size(); ++x2) next[x2] += belief[x] * map[x][x2];
  return normalize(next);
}

inline Categorical predict_outcomes(const Categorical& belief, const DiscreteModel& model) {
  std::vector<double> outcomes(model.observations(), 0.0);
  for (std::size_t x = 0; x < belief.size(); ++x)
    for (std::size_t y = 0; y < outcomes.size(); ++y) outcomes[y] += belief[x] * model.likelihood(y, x);
  return normalize(outcomes);
}

}  // namespace detail

/// Expected free energy of a policy: beliefs are rolled forward through the
/// policy's transitions and each step contributes risk and ambiguity.
inline PolicyScore expected_free_energy(const DiscreteModel& model, const Categorical& q, const Policy& policy,
                                        const Categorical& preferences,
                                        std::span<const TransitionMap> transitions) {
  if (q.size() != model.states()) throw std::invalid_argument("expected_free_energy: q has wrong length");
  if (preferences.size() != model.observations())
    throw std::invalid_argument("expected_free_energy: preferences must cover the observation space");
  for (const auto& map : transitions) {
    if (map.size() != model.states())
      throw std::invalid_argument("expected_free_energy: transition map has wrong source size");
    for (const auto& column : map)
      if (column.size() != model.states())
        throw std::invalid_argument("expected_free_energy: transition map has wrong target size");
  }

  std::vector<double> state_ambiguity(model.states());
  for (std::size_t x = 0; x < model.states(); ++x) state_ambiguity[x] = entropy(model.column(x));

  PolicyScore score;
  Categorical belief = q;
  for (std::size_t action : policy.actions()) {
    if (action >= transitions.size()) throw std::out_of_range("expected_free_energy: invalid action index");
    belief = detail::propagate(belief, transitions[action]);
    score.risk += kl_divergence(detail::predict_outcomes(belief, model), preferences);
    for (std::size_t x = 0; x < belief.size(); ++x) score.ambiguity += belief[x] * state_ambiguity[x];
  }
  score.g = score.risk + score.ambiguity;
  return score;
}

/// q(pi) proportional to E(pi) exp(-precision g(pi)). Returns nullopt when
/// every policy with habit mass has g = +infinity (no viable policy).
inline std::optional<Categorical> policy_posterior(const Categorical& habit, std::span<const PolicyScore> scores,
                                                   double precision) {
  if (habit.size() != scores.size()) throw std::invalid_argument("policy_posterior: habit/score length mismatch");
  if (std::isnan(precision) || precision < 0.0)
    throw std::invalid_argument("policy_posterior: precision must be non-negative");
  if (precision == 0.0) return habit;

  std::vector<double> log_w(habit.size(), -kInf);
  double top = -kInf;
  for (std::size_t i = 0; i < habit.size(); ++i) {
    if (habit[i] == 0.0 || std::isinf(scores[i].g)) continue;
    log_w[i] = std::log(habit[i]) - precision * scores[i].g;
    top = std::max(top, log_w[i]);
  }
  if (std::isinf(top)) return std::nullopt;

  std::vector<double> w(habit.size());
  std::transform(log_w.begin(), log_w.end(), w.begin(),
                 [top](double l) { return std::isinf(l) ? 0.0 : std::exp(l - top); });
  return normalize(w);
}

inline std::optional<Categorical> policy_posterior(const Categorical& habit, std::initializer_list<PolicyScore> scores,
                                                   double precision) {
  return policy_posterior(habit, std::span<const PolicyScore>(scores.begin(), scores.size()), precision);
}

/// Smallest habit mass on the default policy for which the policy posterior
/// keeps the default as argmax, given the largest advantage `g_gap` any
/// alternative has over it and `policies` candidates sharing the remainder.
inline double dominant_habit_threshold(double precision, Nats g_gap, std::size_t policies) {
  if (policies < 2) return 0.0;
  const double x = precision * std::max(g_gap, 0.0);
  const double others = static_cast<double>(policies - 1);
  // kappa / ((1 - kappa) / others) = exp(x)
  return 1.0 / (1.0 + others * std::exp(-x));
}

/// Relevance as the order-reversing transform R = -F.
inline double relevance_score(const FreeEnergyReport& report) { return 0.0 - report.total_f; }

}  // namespace tpsim
