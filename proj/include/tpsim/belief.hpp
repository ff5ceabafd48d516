#pragma once

/**
 * @file belief.hpp
 * @brief Primitives over finite categorical distributions.
 *
 * All information quantities are in nats. Degenerate supports follow the
 * 0 ln 0 = 0 convention; there is no probability floor anywhere, so a
 * divergence that escapes the reference support is reported as +infinity.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpsim/rng.hpp"

namespace tpsim {

/// Natural-log information. Entropies and divergences are >= 0 and may be
/// +infinity; accuracies (expected log-likelihoods) are <= 0.
using Nats = double;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance on the unit-sum invariant of a Categorical.
inline constexpr double kSumTolerance = 1e-9;

class Categorical {
 public:
  /// Throws std::invalid_argument unless `probs` is non-empty, finite,
  /// non-negative and sums to 1 within kSumTolerance.
  explicit Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("categorical: empty support");
    double sum = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0)
        throw std::invalid_argument("categorical: entries must be finite and non-negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw std::invalid_argument("categorical: entries sum to " + std::to_string(sum));
  }

  Categorical(std::initializer_list<double> probs) : Categorical(std::vector<double>(probs)) {}

  static Categorical uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("categorical: empty support");
    return Categorical(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static Categorical one_hot(std::size_t n, std::size_t index) {
    if (index >= n) throw std::out_of_range("categorical: one-hot index out of range");
    std::vector<double> p(n, 0.0);
    p[index] = 1.0;
    return Categorical(std::move(p));
  }

  [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return probs_[i]; }
  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
  [[nodiscard]] auto begin() const noexcept { return probs_.begin(); }
  [[nodiscard]] auto end() const noexcept { return probs_.end(); }

  friend bool operator==(const Categorical&, const Categorical&) = default;

 private:
  std::vector<double> probs_;
};

/// Divide non-negative weights by their sum.
inline Categorical normalize(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("normalize: empty weight vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("normalize: weights must be finite and non-negative");
    sum += w;
  }
  if (sum <= 0.0) throw std::invalid_argument("normalize: all weights are zero");
  std::vector<double> p(weights.size());
  std::transform(weights.begin(), weights.end(), p.begin(), [sum](double w) { return w / sum; });
  return Categorical(std::move(p));
}

inline Categorical normalize(std::initializer_list<double> weights) {
  return normalize(std::span<const double>(weights.begin(), weights.size()));
}

inline Nats entropy(const Categorical& p) {
  double h = 0.0;
  for (double pi : p)
    if (pi > 0.0) h -= pi * std::log(pi);
  return std::max(h, 0.0);
}

/// D_KL[q || p]. +infinity when q puts mass where p has none.
inline Nats kl_divergence(const Categorical& q, const Categorical& p) {
  if (q.size() != p.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return kInf;
    d += q[i] * std::log(q[i] / p[i]);
  }
  // Rounding can leave a tiny negative residue near q == p.
  return std::max(d, 0.0);
}

/// Shannon surprise -ln(evidence).
inline Nats surprise(double evidence) {
  if (!(evidence >= 0.0 && evidence <= 1.0))
    throw std::invalid_argument("surprise: evidence outside [0, 1]");
  return evidence == 0.0 ? kInf : -std::log(evidence);
}

/// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

inline std::size_t argmax(const Categorical& p) { return argmax(p.probs()); }

/// p_i proportional to exp(precision * logit_i). A precision of +infinity
/// selects the one-hot limit at the argmax.
inline Categorical softmax(std::span<const double> logits, double precision) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  for (double l : logits)
    if (!std::isfinite(l)) throw std::invalid_argument("softmax: non-finite logit");
  if (std::isnan(precision) || precision < 0.0)
    throw std::invalid_argument("softmax: precision must be non-negative");
  if (std::isinf(precision)) return Categorical::one_hot(logits.size(), argmax(logits));

  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  std::transform(logits.begin(), logits.end(), w.begin(),
                 [&](double l) { return std::exp(precision * (l - top)); });
  return normalize(w);
}

inline Categorical softmax(std::initializer_list<double> logits, double precision) {
  return softmax(std::span<const double>(logits.begin(), logits.size()), precision);
}

/// Inverse-CDF draw; consumes exactly one uniform from `rng`.
inline std::size_t sample_categorical(const Categorical& p, RngStream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_supported = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    last_supported = i;
    cumulative += p[i];
    if (u < cumulative) return i;
  }
  return last_supported;
}

}  // namespace tpsim
