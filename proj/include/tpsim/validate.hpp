#pragma once

/**
 * @file validate.hpp
 * @brief Self-validation battery: every module's invariants checked against
 *        brute-force references and randomized inputs.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tpsim/agent.hpp"
#include "tpsim/belief.hpp"
#include "tpsim/config.hpp"
#include "tpsim/field.hpp"
#include "tpsim/free_energy.hpp"
#include "tpsim/rng.hpp"
#include "tpsim/scenarios.hpp"
#include "tpsim/serialize.hpp"
#include "tpsim/tu_stream.hpp"
#include "tpsim/world.hpp"

namespace tpsim {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  [[nodiscard]] std::vector<std::string> modules() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (std::find(out.begin(), out.end(), c.module) == out.end()) out.push_back(c.module);
    return out;
  }
};

inline const std::vector<std::string>& validated_modules() {
  static const std::vector<std::string> names{"belief-core", "free-energy", "translation-world", "monitor-agent",
                                              "relevance-field", "tu-stream", "cli"};
  return names;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace check {

inline Categorical random_categorical(RngStream& rng, std::size_t n, double zero_chance = 0.0) {
  std::vector<double> w(n);
  for (double& x : w) x = rng.uniform() < zero_chance ? 0.0 : -std::log(1.0 - rng.uniform());
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) w[0] = 1.0;
  return normalize(w);
}

inline std::size_t random_size(RngStream& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

inline DiscreteModel random_model(RngStream& rng, std::size_t states, std::size_t observations) {
  std::vector<Categorical> cols;
  for (std::size_t x = 0; x < states; ++x) cols.push_back(random_categorical(rng, observations));
  return DiscreteModel(random_categorical(rng, states), std::move(cols));
}

/// G by summing over every state trajectory the policy can produce.
inline PolicyScore enumerate_efe(const DiscreteModel& model, const Categorical& q, const Policy& policy,
                                 const Categorical& c, const std::vector<TransitionMap>& b) {
  const std::size_t horizon = policy.horizon();
  std::vector<std::vector<double>> outcome(horizon, std::vector<double>(model.observations(), 0.0));
  std::vector<double> ambiguity(horizon, 0.0);
  const auto acts = policy.actions();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t step, std::size_t x, double p) {
    if (step == horizon || p == 0.0) return;
    for (std::size_t x2 = 0; x2 < model.states(); ++x2) {
      const double pp = p * b[acts[step]][x][x2];
      if (pp == 0.0) continue;
      for (std::size_t y = 0; y < model.observations(); ++y) {
        const double a = model.likelihood(y, x2);
        outcome[step][y] += pp * a;
        if (a > 0.0) ambiguity[step] -= pp * a * std::log(a);
      }
      walk(step + 1, x2, pp);
    }
  };
  for (std::size_t x = 0; x < model.states(); ++x) walk(0, x, q[x]);

  PolicyScore s;
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t y = 0; y < outcome[t].size(); ++y) {
      const double o = outcome[t][y];
      if (o > 0.0) s.risk += o * (std::log(o) - std::log(c[y]));
    }
    s.ambiguity += ambiguity[t];
  }
  s.g = s.risk + s.ambiguity;
  return s;
}

class Battery {
 public:
  explicit Battery(std::string module, ValidationReport& report) : module_(std::move(module)), report_(report) {}

  template <typename Fn>
  void run(const std::string& name, Fn&& fn) {
    CheckResult r{module_, name, false, ""};
    try {
      std::ostringstream detail;
      r.passed = fn(detail);
      r.detail = detail.str();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    report_.checks.push_back(std::move(r));
  }

 private:
  std::string module_;
  ValidationReport& report_;
};

inline void belief_core(ValidationReport& report) {
  Battery b("belief-core", report);
  b.run("kl_nonnegative_zero_iff_equal", [](std::ostream& out) {
    RngStream rng(101);
    std::size_t bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const std::size_t n = random_size(rng, 2, 8);
      const Categorical p = random_categorical(rng, n, 0.1);
      const Categorical q = random_categorical(rng, n, 0.1);
      const double d = kl_divergence(q, p);
      worst = std::min(worst, d);
      if (!(d >= 0.0)) ++bad;
      if (std::abs(kl_divergence(p, p)) > 1e-12) ++bad;
      double gap = 0.0;
      for (std::size_t k = 0; k < n; ++k) gap = std::max(gap, std::abs(q[k] - p[k]));
      if (gap > 1e-6 && !(d > 0.0)) ++bad;
    }
    out << "10000 pairs, violations " << bad << ", min " << worst;
    return bad == 0;
  });
  b.run("entropy_bounded_by_log_n", [](std::ostream& out) {
    RngStream rng(102);
    std::size_t bad = 0;
    for (int i = 0; i < 5000; ++i) {
      const std::size_t n = random_size(rng, 1, 16);
      const Categorical p = random_categorical(rng, n, 0.2);
      const double h = entropy(p), cap = std::log(static_cast<double>(n));
      if (h > cap + 1e-9) ++bad;
      if (std::abs(entropy(Categorical::uniform(n)) - cap) > 1e-9) ++bad;
      const bool uniform = std::all_of(p.begin(), p.end(), [&](double v) { return std::abs(v - 1.0 / n) < 1e-6; });
      if (!uniform && h > cap - 1e-9) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
  b.run("softmax_is_categorical", [](std::ostream& out) {
    RngStream rng(103);
    std::size_t bad = 0;
    for (int i = 0; i < 5000; ++i) {
      std::vector<double> logits(random_size(rng, 1, 10));
      for (double& l : logits) l = (rng.uniform() - 0.5) * 2000.0;
      const double gamma = rng.uniform() * 50.0;
      const Categorical c = softmax(logits, gamma);
      double sum = 0.0;
      for (double v : c) {
        if (!(v >= 0.0)) ++bad;
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
  b.run("normalize_idempotent", [](std::ostream& out) {
    RngStream rng(104);
    std::size_t bad = 0;
    for (int i = 0; i < 5000; ++i) {
      std::vector<double> w(random_size(rng, 1, 12));
      for (double& x : w) x = rng.uniform() * 1e3;
      w[0] += 1.0;
      const Categorical once = normalize(w);
      const Categorical twice = normalize(once.probs());
      for (std::size_t k = 0; k < w.size(); ++k)
        if (std::abs(once[k] - twice[k]) > 1e-12) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
  b.run("sampler_reproducible", [](std::ostream& out) {
    const Categorical p{0.1, 0.2, 0.3, 0.4};
    RngStream a(7), c(7);
    std::size_t bad = 0;
    for (int i = 0; i < 10000; ++i)
      if (sample_categorical(p, a) != sample_categorical(p, c)) ++bad;
    out << "mismatches " << bad;
    return bad == 0 && a.counter() == c.counter();
  });
}

inline void free_energy(ValidationReport& report) {
  Battery b("free-energy", report);
  b.run("factorization_identity", [](std::ostream& out) {
    RngStream rng(201);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto m = random_model(rng, random_size(rng, 2, 16), random_size(rng, 2, 16));
      const Categorical q = random_categorical(rng, m.states());
      const auto r = variational_free_energy(q, m, random_size(rng, 0, m.observations() - 1));
      worst = std::max({worst, std::abs(r.divergence + r.evidence_surprise - r.total_f),
                        std::abs(r.complexity - r.accuracy - r.total_f)});
    }
    out << "1000 models, max gap " << worst;
    return worst <= 1e-9;
  });
  b.run("evidence_bound", [](std::ostream& out) {
    RngStream rng(202);
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto m = random_model(rng, random_size(rng, 2, 16), random_size(rng, 2, 16));
      const std::size_t y = random_size(rng, 0, m.observations() - 1);
      const auto post = exact_posterior(m, y);
      const auto rq = variational_free_energy(random_categorical(rng, m.states()), m, y);
      const auto rp = variational_free_energy(*post.posterior, m, y);
      if (rq.total_f < rq.evidence_surprise - 1e-9) ++bad;
      if (std::abs(rp.total_f - rp.evidence_surprise) > 1e-9) ++bad;
      if (rq.divergence > 1e-9 && std::abs(rq.total_f - rq.evidence_surprise) <= 1e-12) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
  b.run("posterior_minimizes_f", [](std::ostream& out) {
    RngStream rng(203);
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto m = random_model(rng, random_size(rng, 2, 8), random_size(rng, 2, 8));
      const std::size_t y = random_size(rng, 0, m.observations() - 1);
      const double best = variational_free_energy(*exact_posterior(m, y).posterior, m, y).total_f;
      for (int k = 0; k < 100; ++k)
        if (variational_free_energy(random_categorical(rng, m.states()), m, y).total_f <= best) ++bad;
    }
    out << "100000 candidates, violations " << bad;
    return bad == 0;
  });
  b.run("efe_matches_enumeration", [](std::ostream& out) {
    RngStream rng(204);
    double worst = 0.0;
    std::size_t argmin_bad = 0;
    for (int i = 0; i < 200; ++i) {
      const std::size_t ns = random_size(rng, 1, 4), no = random_size(rng, 2, 4), na = random_size(rng, 1, 4);
      const std::size_t horizon = random_size(rng, 1, 3);
      const auto m = random_model(rng, ns, no);
      std::vector<TransitionMap> trans(na);
      for (auto& map : trans)
        for (std::size_t x = 0; x < ns; ++x) map.push_back(random_categorical(rng, ns, 0.3));
      const Categorical q = random_categorical(rng, ns, 0.2);
      const Categorical c = random_categorical(rng, no);

      std::vector<Policy> policies;
      std::vector<std::size_t> seq(horizon, 0);
      for (;;) {
        policies.emplace_back(seq);
        std::size_t k = 0;
        while (k < horizon && ++seq[k] == na) seq[k++] = 0;
        if (k == horizon) break;
      }
      std::vector<PolicyScore> scores;
      std::size_t brute = 0;
      double brute_g = kInf;
      for (std::size_t p = 0; p < policies.size(); ++p) {
        const auto got = expected_free_energy(m, q, policies[p], c, trans);
        const auto ref = enumerate_efe(m, q, policies[p], c, trans);
        worst = std::max({worst, std::abs(got.g - ref.g), std::abs(got.risk - ref.risk)});
        scores.push_back(got);
        if (ref.g < brute_g - 1e-12) {
          brute_g = ref.g;
          brute = p;
        }
      }
      const auto qpi = policy_posterior(Categorical::uniform(scores.size()), scores, 1e6);
      if (!qpi || std::abs(scores[argmax(*qpi)].g - brute_g) > 1e-9) ++argmin_bad;
      (void)brute;
    }
    out << "200 instances, max gap " << worst << ", argmin mismatches " << argmin_bad;
    return worst <= 1e-9 && argmin_bad == 0;
  });
  b.run("policy_posterior_shift_invariant", [](std::ostream& out) {
    RngStream rng(205);
    std::size_t bad = 0;
    for (int i = 0; i < 2000; ++i) {
      const std::size_t n = random_size(rng, 2, 8);
      const Categorical habit = random_categorical(rng, n);
      std::vector<PolicyScore> s(n), shifted(n);
      const double shift = (rng.uniform() - 0.5) * 200.0;
      for (std::size_t k = 0; k < n; ++k) {
        s[k].g = rng.uniform() * 10.0;
        shifted[k].g = s[k].g + shift;
      }
      const double gamma = rng.uniform() * 10.0;
      if (argmax(*policy_posterior(habit, s, gamma)) != argmax(*policy_posterior(habit, shifted, gamma))) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
  b.run("relevance_order_reversing", [](std::ostream& out) {
    RngStream rng(206);
    std::size_t bad = 0;
    for (int i = 0; i < 2000; ++i) {
      const auto m = random_model(rng, 3, 3);
      const auto a = variational_free_energy(random_categorical(rng, 3), m, 0);
      const auto c = variational_free_energy(random_categorical(rng, 3), m, 0);
      if ((a.total_f < c.total_f) != (relevance_score(a) > relevance_score(c))) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
}

inline void translation_world(ValidationReport& report) {
  Battery b("translation-world", report);
  b.run("build_task_deterministic", [](std::ostream& out) {
    std::size_t bad = 0;
    for (const auto& s : {scen_easy(), scen_hard(), scen_blocked()})
      if (json::to_json(build_task(s.task)).dump() != json::to_json(build_task(s.task)).dump()) ++bad;
    out << "mismatching scenarios " << bad;
    return bad == 0;
  });
  b.run("embedded_categoricals_valid", [](std::ostream& out) {
    std::size_t bad = 0, seen = 0;
    auto ok = [&](const Categorical& c) {
      ++seen;
      double sum = 0.0;
      for (double v : c) {
        if (!(v >= 0.0 && v <= 1.0)) ++bad;
        sum += v;
      }
      if (std::abs(sum - 1.0) > kSumTolerance) ++bad;
    };
    for (const auto& s : {scen_easy(), scen_hard(), scen_blocked()}) {
      const TranslationTask task = build_task(s.task);
      ok(task.preferences);
      for (const auto& e : task.lexicon) {
        ok(e.senses.prior());
        ok(e.habit);
        for (std::size_t x = 0; x < e.sense_count(); ++x) ok(e.senses.column(x));
      }
    }
    out << seen << " distributions, violations " << bad;
    return bad == 0;
  });
  b.run("default_adequacy_monotone_in_rho", [](std::ostream& out) {
    const Scenario base = scen_hard();
    std::vector<double> rhos, freq;
    for (double rho : default_sweep_grid().front().values()) {
      TaskConfig cfg = base.task;
      cfg.context_overlap = rho;
      std::size_t hits = 0, draws = 0;
      for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        cfg.seed = seed;
        const TranslationTask task = build_task(cfg);
        RngStream rng = RngStream(seed).split(stream_tag::kEvents);
        for (std::size_t t = 0; t < task.source.size(); ++t) {
          if (!task.entry_at(t).ambiguous) continue;
          ++draws;
          if (emit_feedback(task, t, argmax(task.entry_at(t).habit), rng) == FeedbackObs::adequate) ++hits;
        }
      }
      rhos.push_back(rho);
      freq.push_back(static_cast<double>(hits) / static_cast<double>(draws));
    }
    const double rs = spearman(rhos, freq);
    out << "spearman " << rs << " over";
    for (double f : freq) out << ' ' << f;
    return rs >= 0.99;
  });
}

inline std::vector<SessionTrace> scenario_traces(const Scenario& s, std::size_t replicas,
                                                 const MonitorConfig* override_monitor = nullptr) {
  std::vector<SessionTrace> out;
  for (std::uint64_t seed = 1; seed <= replicas; ++seed) {
    TaskConfig cfg = s.task;
    cfg.seed = seed;
    const MonitorConfig& m = override_monitor ? *override_monitor : s.monitor;
    out.push_back(run_session(build_task(cfg, m.habit_strength), m, seed));
  }
  return out;
}

inline void monitor_agent(ValidationReport& report) {
  Battery b("monitor-agent", report);
  const auto hard = scenario_traces(scen_hard(), 100);
  b.run("two_timescale_separation", [&](std::ostream& out) {
    std::size_t bad = 0;
    for (const auto& tr : hard) {
      std::uint64_t s_max = 0, i_min = UINT64_MAX;
      for (const auto& r : tr.records) {
        if (r.mode == Mode::smode)
          s_max = std::max(s_max, r.fast_ticks);
        else
          i_min = std::min(i_min, r.fast_ticks);
      }
      if (i_min != UINT64_MAX && i_min <= s_max) ++bad;
    }
    out << "sessions violating " << bad;
    return bad == 0;
  });
  b.run("imode_effort_exceeds_smode", [&](std::ostream& out) {
    std::size_t bad = 0, mixed = 0;
    for (const auto& tr : hard) {
      double se = 0, ie = 0;
      std::size_t sn = 0, in = 0;
      for (const auto& r : tr.records) {
        if (r.mode == Mode::smode) {
          se += r.effort();
          ++sn;
        } else {
          ie += r.effort();
          ++in;
        }
      }
      if (sn == 0 || in == 0) continue;
      ++mixed;
      if (!(se == 0.0 && ie / in > 0.0)) ++bad;
    }
    out << mixed << " mixed sessions, violations " << bad;
    return mixed > 0 && bad == 0;
  });
  b.run("triggers_non_increasing_in_theta", [](std::ostream& out) {
    const Scenario s = scen_hard();
    const std::vector<double> thetas{0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0};
    std::size_t bad = 0;
    std::vector<double> means;
    std::vector<std::vector<std::size_t>> counts(thetas.size());
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      MonitorConfig m = s.monitor;
      m.theta = thetas[k];
      double sum = 0;
      for (const auto& tr : scenario_traces(s, 100, &m)) {
        counts[k].push_back(tr.totals.imode_triggers);
        sum += static_cast<double>(tr.totals.imode_triggers);
      }
      means.push_back(sum / 100.0);
    }
    for (std::size_t k = 1; k < thetas.size(); ++k)
      for (std::size_t r = 0; r < counts[k].size(); ++r)
        if (counts[k][r] > counts[k - 1][r]) ++bad;
    out << "per-session violations " << bad << ", mean triggers";
    for (double v : means) out << ' ' << v;
    return bad == 0;
  });
  b.run("habit_dominance", [](std::ostream& out) {
    constexpr double kBound = 5.0;  // nats of gamma * g_spread
    MonitorConfig m = scen_hard().monitor;
    m.habit_strength = 1.0 - 1e-6;
    std::size_t checked = 0, bad = 0;
    double worst = 0.0;
    for (double gamma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      m.precision = gamma;
      SweepBase base{scen_hard().task, m, {}};
      for (const auto& sess : field_sweep_sessions(base, default_sweep_grid(), 20, 7, 1)) {
        for (const auto& r : sess.trace.records) {
          if (r.mode != Mode::imode || !std::isfinite(r.effort_e2)) continue;
          if (gamma * r.g_spread > kBound) continue;
          ++checked;
          worst = std::max(worst, r.effort_e2);
          if (r.effort_e2 >= 1e-3) ++bad;
        }
      }
    }
    out << checked << " bounded i-mode steps, max E2 " << worst;
    return checked > 0 && bad == 0;
  });
  b.run("habit_argmax_above_threshold", [](std::ostream& out) {
    RngStream rng(301);
    std::size_t bad = 0;
    for (int i = 0; i < 2000; ++i) {
      const std::size_t n = random_size(rng, 2, 6);
      const double gamma = rng.uniform() * 8.0, gap = rng.uniform() * 3.0;
      std::vector<PolicyScore> s(n);
      s[0].g = gap;
      for (std::size_t k = 1; k < n; ++k) s[k].g = rng.uniform() * gap;
      s[1].g = 0.0;
      const double kappa = std::min(1.0, dominant_habit_threshold(gamma, gap, n) + 1e-9 + rng.uniform() * 1e-3);
      if (kappa >= 1.0) continue;
      if (argmax(*policy_posterior(TranslationTask::concentrated(n, kappa), s, gamma)) != 0) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
  b.run("abandonment_sound", [](std::ostream& out) {
    std::size_t bad = 0, abandoned = 0;
    for (const auto& s : {scen_easy(), scen_hard(), scen_blocked()}) {
      for (const auto& tr : scenario_traces(s, 100)) {
        double cum = 0.0, before_last = 0.0;
        for (const auto& r : tr.records) {
          before_last = cum;
          cum += r.effort();
        }
        const bool over = cum > s.monitor.effort_budget;
        if ((tr.status == SessionStatus::abandoned) != over) ++bad;
        if (tr.status == SessionStatus::abandoned) {
          ++abandoned;
          if (before_last > s.monitor.effort_budget) ++bad;
        }
      }
    }
    out << abandoned << " abandoned sessions, violations " << bad;
    return abandoned > 0 && bad == 0;
  });
  b.run("session_deterministic", [](std::ostream& out) {
    std::size_t bad = 0;
    for (const auto& s : {scen_easy(), scen_hard(), scen_blocked()}) {
      const TranslationTask task = build_task(s.task);
      if (json::to_json(run_session(task, s.monitor, 9)).dump() != json::to_json(run_session(task, s.monitor, 9)).dump())
        ++bad;
    }
    out << "mismatching scenarios " << bad;
    return bad == 0;
  });
}

inline void relevance_field(ValidationReport& report) {
  Battery b("relevance-field", report);
  b.run("classification_total", [](std::ostream& out) {
    RngStream rng(401);
    const RelevanceBoundary boundary;
    std::size_t bad = 0;
    for (int i = 0; i < 5000; ++i) {
      RelevancePath p;
      p.points.push_back({});
      p.points.push_back({rng.uniform() * 30.0, rng.uniform() * 6.0, 1});
      p.terminal_status = rng.uniform() < 0.2 ? SessionStatus::abandoned : SessionStatus::completed;
      const PathClass c = classify_path(p, boundary);
      const PathPoint& e = p.terminal();
      const int hits = (p.terminal_status == SessionStatus::abandoned) +
                       (p.terminal_status == SessionStatus::completed && e.effect >= 2.0 && e.effort <= 10.0) +
                       (p.terminal_status == SessionStatus::completed && e.effect >= 2.0 && e.effort > 10.0) +
                       (p.terminal_status == SessionStatus::completed && e.effect < 2.0);
      if (hits != 1 || path_class_from_string(to_string(c)) != c) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
  b.run("scenario_relevance_ordering", [](std::ostream& out) {
    std::vector<double> means;
    for (const auto& s : {scen_easy(), scen_hard(), scen_blocked()}) {
      double sum = 0.0;
      for (const auto& tr : scenario_traces(s, 100)) sum += session_relevance(tr);
      means.push_back(sum / 100.0);
    }
    out << "easy " << means[0] << ", hard " << means[1] << ", blocked " << means[2];
    return means[0] > means[1] && means[1] > means[2];
  });
  b.run("diminishing_returns", [](std::ostream& out) {
    const Scenario s = scen_hard();
    const auto rows = field_sweep({s.task, s.monitor, {}}, default_sweep_grid(), kDefaultReplicas, 7);
    const TercileReturns t = tercile_returns(rows);
    out << t.sessions << " effortful sessions, effect per nat " << t.pooled_ratio[0] << ' ' << t.pooled_ratio[1] << ' '
        << t.pooled_ratio[2];
    return t.sessions >= 3 && t.pooled_ratio[0] >= t.pooled_ratio[1] && t.pooled_ratio[1] >= t.pooled_ratio[2];
  });
}

inline void tu_stream(ValidationReport& report) {
  Battery b("tu-stream", report);
  const auto hard = scenario_traces(scen_hard(), 100);
  const TimingModel timing;
  b.run("timestamps_ordered_and_contiguous", [&](std::ostream& out) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < hard.size(); ++i) {
      const auto ev = emit_events(hard[i], timing, RngStream(i).split(stream_tag::kEvents));
      for (std::size_t k = 1; k < ev.size(); ++k)
        if (ev[k].timestamp_ms < ev[k - 1].timestamp_ms || ev[k].tu_index < ev[k - 1].tu_index) ++bad;
    }
    out << "violations " << bad;
    return bad == 0;
  });
  b.run("pauses_bimodal_by_mode", [&](std::ostream& out) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < hard.size(); ++i) {
      const auto ev = emit_events(hard[i], timing, RngStream(i).split(stream_tag::kEvents));
      std::int64_t s_max = -1, i_min = INT64_MAX;
      for (const auto& r : summarize_tus(ev, hard[i], "v", PathClass::HighRelevance)) {
        if (r.mode == Mode::smode)
          s_max = std::max(s_max, r.pause_before_ms);
        else
          i_min = std::min(i_min, r.pause_before_ms);
      }
      if (i_min != INT64_MAX && s_max >= i_min) ++bad;
    }
    out << "sessions violating " << bad;
    return bad == 0;
  });
  b.run("tables_round_trip", [&](std::ostream& out) {
    const auto ev = emit_events(hard[0], timing, RngStream(3));
    const auto rows = summarize_tus(ev, hard[0], "rt", PathClass::EffortfulSuccess);
    std::stringstream a, c;
    write_table(rows, a);
    write_events(ev, c);
    const bool ok = read_table(a) == rows && read_events(c) == ev;
    std::stringstream empty;
    write_table({}, empty);
    out << rows.size() << " rows, " << ev.size() << " events";
    return ok && read_table(empty).empty();
  });
}

inline void cli(ValidationReport& report) {
  Battery b("cli", report);
  b.run("empty_config_is_defaults", [](std::ostream& out) {
    const RunConfig cfg = parse_config("");
    const Scenario easy = scen_easy();
    out << "defaults parsed";
    return to_json(cfg) == to_json(RunConfig{}) && cfg.task.context_overlap == easy.task.context_overlap &&
           cfg.task.senses_per_token == easy.task.senses_per_token;
  });
  b.run("unknown_keys_rejected", [](std::ostream& out) {
    try {
      (void)parse_config(R"({"monitor": {"thetta": 1}})");
    } catch (const ConfigError& e) {
      out << e.what();
      return e.field() == "monitor.thetta";
    }
    out << "accepted";
    return false;
  });
  b.run("config_round_trip", [](std::ostream& out) {
    RunConfig cfg;
    cfg.task = scen_hard().task;
    cfg.monitor.theta = 0.75;
    cfg.master_seed = 99;
    const RunConfig back = parse_config(to_json(cfg).dump());
    out << "echo compared";
    return to_json(back) == to_json(cfg);
  });
}

}  // namespace check

inline ValidationReport run_validation() {
  ValidationReport report;
  check::belief_core(report);
  check::free_energy(report);
  check::translation_world(report);
  check::monitor_agent(report);
  check::relevance_field(report);
  check::tu_stream(report);
  check::cli(report);
  return report;
}

inline nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"module", c.module}, {"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  const auto failed = std::count_if(report.checks.begin(), report.checks.end(), [](const auto& c) { return !c.passed; });
  return {{"passed", report.passed()},
          {"total", report.checks.size()},
          {"failed", failed},
          {"modules", report.modules()},
          {"checks", checks}};
}

}  // namespace tpsim
