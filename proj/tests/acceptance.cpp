// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tpsim/cli.hpp"

using namespace tpsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body, double limit_s = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs >= limit_s) {
    o.pass = false;
    o.detail += " [over time limit " + std::to_string(limit_s) + " s]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

Categorical random_dist(std::mt19937_64& gen, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = e(gen) + 1e-6;
  return normalize(w);
}

struct Instance {
  DiscreteModel model;
  oracle::Vec prior;
  oracle::Mat lik;
};

Instance random_instance(std::mt19937_64& gen, std::size_t states, std::size_t obs) {
  std::vector<Categorical> cols;
  for (std::size_t x = 0; x < states; ++x) cols.push_back(random_dist(gen, obs));
  const Categorical prior = random_dist(gen, states);
  oracle::Mat lik(obs, oracle::Vec(states));
  for (std::size_t y = 0; y < obs; ++y)
    for (std::size_t x = 0; x < states; ++x) lik[y][x] = cols[x][y];
  return {DiscreteModel(prior, cols), oracle::widen({prior.begin(), prior.end()}), lik};
}

oracle::Vec wide(const Categorical& c) { return oracle::widen({c.begin(), c.end()}); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

SweepBase hard_base() {
  const Scenario s = scen_hard();
  return {s.task, s.monitor, {}};
}

}  // namespace

int main() {
  criterion(1, "factorization identity", [] {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<std::size_t> dim(2, 16);
    double gap = 0.0, oracle_gap = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto inst = random_instance(gen, dim(gen), dim(gen));
      const Categorical q = random_dist(gen, inst.model.states());
      const std::size_t y = std::uniform_int_distribution<std::size_t>(0, inst.model.observations() - 1)(gen);
      const auto r = variational_free_energy(q, inst.model, y);
      const double a = r.divergence + r.evidence_surprise, b = r.complexity - r.accuracy;
      gap = std::max({gap, std::abs(a - b), std::abs(a - r.total_f), std::abs(b - r.total_f)});
      oracle_gap = std::max(oracle_gap,
                            std::abs(r.total_f - static_cast<double>(oracle::free_energy(wide(q), inst.prior, inst.lik, y))));
    }
    return Outcome{gap <= 1e-9 && oracle_gap <= 1e-9,
                   fmt("1000 models, max factorization gap %.3g, max gap to oracle %.3g", gap, oracle_gap)};
  }, 2.0);

  criterion(2, "evidence bound", [] {
    std::mt19937_64 gen(2);
    std::uniform_int_distribution<std::size_t> dim(2, 16);
    std::size_t below = 0, equal_far = 0, unequal_at_post = 0, perturbed_equal = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto inst = random_instance(gen, dim(gen), dim(gen));
      const std::size_t y = std::uniform_int_distribution<std::size_t>(0, inst.model.observations() - 1)(gen);
      const auto ref = oracle::bayes(inst.prior, inst.lik, y);
      const double s = -std::log(static_cast<double>(ref.evidence));
      const Categorical post = *exact_posterior(inst.model, y).posterior;
      auto distance = [&](const Categorical& q) {
        double d = 0;
        for (std::size_t x = 0; x < q.size(); ++x) d = std::max(d, std::abs(q[x] - static_cast<double>(ref.posterior[x])));
        return d;
      };
      std::vector<double> mixed(post.size());
      for (std::size_t x = 0; x < post.size(); ++x) mixed[x] = 0.99 * post[x] + 0.01 / static_cast<double>(post.size());
      for (const Categorical& q : {random_dist(gen, inst.model.states()), post, Categorical(mixed)}) {
        const double f = variational_free_energy(q, inst.model, y).total_f;
        if (f < s - 1e-12) ++below;
        const bool equal = std::abs(f - s) <= 1e-9;
        const bool at_post = distance(q) <= 1e-9;
        if (at_post && !equal) ++unequal_at_post;
        if (!at_post && equal && distance(q) > 1e-4) ++equal_far;
      }
      if (std::abs(variational_free_energy(Categorical(mixed), inst.model, y).total_f - s) <= 1e-9 &&
          distance(Categorical(mixed)) > 1e-9)
        ++perturbed_equal;
    }
    const bool ok = below == 0 && equal_far == 0 && unequal_at_post == 0;
    return Outcome{ok, fmt("3000 cases, below bound %.0f, equality away from posterior %.0f, gap at posterior %.0f, "
                           "tight perturbations %.0f",
                           static_cast<double>(below), static_cast<double>(equal_far),
                           static_cast<double>(unequal_at_post), static_cast<double>(perturbed_equal))};
  });

  criterion(3, "worked two-state values", [] {
    const auto m = DiscreteModel::from_rows(Categorical({0.5, 0.5}), {{0.9, 0.2}, {0.1, 0.8}});
    const auto post = exact_posterior(m, 0);
    const auto r = variational_free_energy(Categorical({0.5, 0.5}), m, 0);
    const auto ref = oracle::bayes({0.5L, 0.5L}, {{0.9L, 0.2L}, {0.1L, 0.8L}}, 0);
    const double ref_div = static_cast<double>(oracle::kl({0.5L, 0.5L}, ref.posterior));
    const bool ok = std::abs((*post.posterior)[0] - 0.8182) <= 1e-4 && std::abs((*post.posterior)[1] - 0.1818) <= 1e-4 &&
                    std::abs(post.evidence - 0.55) <= 1e-4 && std::abs(r.divergence - 0.2596) <= 1e-4 &&
                    std::abs(r.complexity) <= 1e-4 && std::abs(r.accuracy + 0.8574) <= 1e-4 &&
                    std::abs(r.total_f - 0.8574) <= 1e-4 && std::abs(r.divergence - ref_div) <= 1e-12;
    return Outcome{ok, fmt("posterior [%.4f, %.4f], divergence %.4f, F %.4f", (*post.posterior)[0], (*post.posterior)[1],
                           r.divergence, r.total_f)};
  });

  criterion(4, "expected free energy vs enumeration", [] {
    std::mt19937_64 gen(4);
    std::uniform_int_distribution<std::size_t> small(1, 4), obs(2, 4), hor(1, 3);
    std::uniform_real_distribution<double> u(0, 1);
    double gap = 0.0;
    std::size_t mismatches = 0, instances = 0, policies = 0;
    for (; instances < 150; ++instances) {
      const std::size_t ns = small(gen), na = small(gen), horizon = hor(gen), no = obs(gen);
      const auto inst = random_instance(gen, ns, no);
      std::vector<TransitionMap> trans(na);
      std::vector<oracle::Mat> otrans(na);
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t x = 0; x < ns; ++x) {
          std::vector<double> w(ns);
          for (auto& v : w) v = u(gen) < 0.3 ? 0.0 : u(gen);
          w[x] += 1e-3;
          trans[a].push_back(normalize(w));
          otrans[a].push_back(wide(trans[a].back()));
        }
      const Categorical q = random_dist(gen, ns), c = random_dist(gen, no);
      std::vector<std::vector<std::size_t>> seqs;
      std::vector<std::size_t> seq(horizon, 0);
      for (;;) {
        seqs.push_back(seq);
        std::size_t k = 0;
        while (k < horizon && ++seq[k] == na) seq[k++] = 0;
        if (k == horizon) break;
      }
      std::vector<PolicyScore> scores;
      long double best = INFINITY;
      std::vector<long double> ref_g;
      for (const auto& s : seqs) {
        const auto got = expected_free_energy(inst.model, q, Policy(s), c, trans);
        const auto ref = oracle::efe(wide(q), inst.lik, otrans, s, wide(c));
        gap = std::max({gap, std::abs(got.g - static_cast<double>(ref.g)), std::abs(got.risk - static_cast<double>(ref.risk)),
                        std::abs(got.ambiguity - static_cast<double>(ref.ambiguity))});
        scores.push_back(got);
        ref_g.push_back(ref.g);
        best = std::min(best, ref.g);
      }
      policies += seqs.size();
      const auto qpi = policy_posterior(Categorical::uniform(scores.size()), scores, 4.0);
      if (!qpi || std::abs(static_cast<double>(ref_g[argmax(*qpi)] - best)) > 1e-9) ++mismatches;
    }
    return Outcome{gap <= 1e-9 && mismatches == 0,
                   fmt("%.0f instances, %.0f policies, max gap %.3g, argmax/argmin mismatches %.0f",
                       static_cast<double>(instances), static_cast<double>(policies), gap, static_cast<double>(mismatches))};
  });

  criterion(5, "habit dominance", [] {
    constexpr double kBound = 5.0;  // gamma times the spread of g over candidates, in nats
    std::size_t bounded = 0, over = 0;
    double worst = 0.0;
    for (double gamma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      SweepBase base = hard_base();
      base.monitor.habit_strength = 1.0 - 1e-6;
      base.monitor.precision = gamma;
      for (const auto& s : field_sweep_sessions(base, default_sweep_grid(), kDefaultReplicas, 7))
        for (const auto& r : s.trace.records) {
          if (r.mode != Mode::imode || !(gamma * r.g_spread <= kBound)) continue;
          ++bounded;
          worst = std::max(worst, r.effort_e2);
          if (!(r.effort_e2 < 1e-3)) ++over;
        }
    }
    std::vector<GridAxis> grid = default_sweep_grid();
    grid.push_back(parse_grid_axis("theta=0:4:0.5"));
    const auto rows = field_sweep(hard_base(), grid, kDefaultReplicas, 7);
    const std::size_t thetas = grid[1].values().size();
    std::size_t increases = 0, misaligned = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k % (thetas * kDefaultReplicas) < kDefaultReplicas) continue;
      const SweepRow& lo = rows[k - kDefaultReplicas];
      if (lo.rho != rows[k].rho || !(lo.theta < rows[k].theta) || lo.seed != rows[k].seed) ++misaligned;
      if (rows[k].imode_count > lo.imode_count) ++increases;
    }
    return Outcome{bounded > 0 && over == 0 && increases == 0 && misaligned == 0,
                   fmt("%.0f bounded i-mode steps, max E2 %.3g nats; theta sweep %.0f sessions, %.0f trigger increases",
                       static_cast<double>(bounded), worst, static_cast<double>(rows.size()), static_cast<double>(increases))};
  });

  criterion(6, "mode asymmetry", [] {
    const TimingModel timing;
    double e[2] = {}, d[2] = {};
    std::size_t n[2] = {};
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      TaskConfig cfg = scen_hard().task;
      cfg.seed = seed;
      const auto trace = run_session(build_task(cfg), scen_hard().monitor, seed);
      const auto events = emit_events(trace, timing, RngStream(seed).split(stream_tag::kEvents));
      for (const auto& row : summarize_tus(events, trace, "a", PathClass::HighRelevance)) {
        const int m = row.mode == Mode::imode;
        e[m] += row.effort_e1_nats + row.effort_e2_nats;
        d[m] += static_cast<double>(row.dur_ms);
        ++n[m];
      }
    }
    if (n[0] == 0 || n[1] == 0) return Outcome{false, "a mode never occurred"};
    const double eg = e[1] / n[1] - e[0] / n[0], dg = d[1] / n[1] - d[0] / n[0];
    return Outcome{eg > 0.1 && dg > 500.0, fmt("effort gap %.3f nats, duration gap %.1f ms (i-mode %.1f vs s-mode %.1f ms)",
                                               eg, dg, d[1] / n[1], d[0] / n[0])};
  }, 10.0);

  criterion(7, "field of relevance shape", [] {
    std::size_t hits[3] = {};
    double relevance[3] = {};
    const Scenario scenarios[3] = {scen_easy(), scen_hard(), scen_blocked()};
    for (int k = 0; k < 3; ++k) {
      for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        TaskConfig cfg = scenarios[k].task;
        cfg.seed = seed;
        const auto trace = run_session(build_task(cfg), scenarios[k].monitor, seed);
        const PathClass c = classify_path(trace_path(trace), RelevanceBoundary{});
        relevance[k] += session_relevance(trace) / 100.0;
        if (k == 0) hits[k] += c == PathClass::HighRelevance;
        if (k == 1)
          hits[k] += (c == PathClass::EffortfulSuccess || c == PathClass::HighRelevance) && trace.totals.imode_triggers >= 1;
        if (k == 2) hits[k] += c == PathClass::Abandoned;
      }
    }
    const bool ok = hits[0] >= 95 && hits[1] >= 95 && hits[2] >= 95 && relevance[0] > relevance[1] &&
                    relevance[1] > relevance[2];
    return Outcome{ok, fmt("easy %.0f/100, hard %.0f/100, blocked %.0f/100; ", hits[0], hits[1], hits[2]) +
                           fmt("mean relevance %.3f > %.3f > %.3f", relevance[0], relevance[1], relevance[2])};
  });

  criterion(8, "diminishing returns", [] {
    const auto rows = field_sweep(hard_base(), default_sweep_grid(), kDefaultReplicas, 7);
    const TercileReturns t = tercile_returns(rows);
    const bool ok = rows.size() == 500 && t.sessions >= 3 && t.pooled_ratio[0] >= t.pooled_ratio[1] &&
                    t.pooled_ratio[1] >= t.pooled_ratio[2];
    return Outcome{ok, fmt("%.0f sessions, %.0f effortful; effect per nat by tercile ", static_cast<double>(rows.size()),
                           static_cast<double>(t.sessions)) +
                           fmt("%.3f >= %.3f >= %.3f (between-tercile slopes %.3f, ", t.pooled_ratio[0],
                               t.pooled_ratio[1], t.pooled_ratio[2], t.marginal[1]) +
                           fmt("%.3f)", t.marginal[2])};
  });

  criterion(9, "determinism and validation", [] {
    const fs::path root = fs::temp_directory_path() / "tpsim_acceptance";
    fs::remove_all(root);
    auto slurp_dir = [](const fs::path& dir) {
      std::string all;
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        all += f.filename().string() + '\n' + s.str();
      }
      return all;
    };
    std::size_t identical = 0, differing = 0;
    int validate_code = -1;
    for (const std::string cmd : {"run", "sweep", "field", "demo", "validate"}) {
      std::string first;
      for (const char* side : {"a", "b"}) {
        cli::Options opt;
        opt.command = cmd;
        opt.demo_name = "table1";
        opt.seed = 11;
        opt.replicas = 20;
        opt.svg = true;
        opt.out_dir = (root / (cmd + side)).string();
        std::ostringstream log, err;
        const int code = cli::execute(opt, log, err);
        if (cmd == "validate") validate_code = code;
        else if (code != 0) return Outcome{false, cmd + " failed: " + err.str()};
        const std::string now = slurp_dir(opt.out_dir.value());
        if (first.empty()) first = now;
        else (now == first ? identical : differing) += 1;
      }
    }
    std::ifstream in(root / "validatea" / "validate_report.json");
    const auto report = nlohmann::json::parse(in);
    bool covered = true;
    for (const auto& m : validated_modules()) {
      std::size_t checks = 0;
      for (const auto& c : report["checks"]) checks += c["module"] == m;
      covered = covered && checks > 0;
    }
    fs::remove_all(root);
    return Outcome{differing == 0 && identical == 5 && validate_code == 0 && covered,
                   fmt("%.0f/5 commands byte-identical, validate exit %.0f, %.0f checks over 7 modules",
                       static_cast<double>(identical), validate_code, static_cast<double>(report["checks"].size()))};
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
