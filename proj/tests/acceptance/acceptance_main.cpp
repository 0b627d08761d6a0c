// Acceptance gate: one PASS/FAIL line per criterion. `--only N` runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "core/allocator.hpp"
#include "core/classifier.hpp"
#include "core/config.hpp"
#include "core/domains.hpp"
#include "core/engine.hpp"
#include "core/harness.hpp"
#include "support/property_checks.hpp"
#include "support/synthetic_models.hpp"

using namespace rspi;
using namespace rspi::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Run-to-acceptance on one 3-action state with returns on [-1, 0]; the
// middle action is best by 0.3.
Verdict gate_soundness() {
  const IntervalBanditModel model({-0.95, -0.6, -0.9}, {-0.35, 0.0, -0.3});
  const GateParams gate{0.1, 1.0, 3};
  const RolloutConfig rollout{1, 1.0};
  const Policy policy = Policy::uniform(3);
  const std::size_t reps = 1000;
  std::size_t wrong = 0, unfinished = 0, total_samples = 0;
  const RandomStream root(20240101);
  for (std::size_t r = 0; r < reps; ++r) {
    StateStats stats = StateStats::fresh(StateVector{0.0}, r, 3);
    const RandomStream rep = root.split(r);
    while (!stop_accept(stats, gate) && stats.count < 100000) {
      update_stats(stats, sample_state(model, stats.state, policy, rollout, rep.split(stats.count)));
    }
    if (!stop_accept(stats, gate)) ++unfinished;
    else if (stats.a_hat.index != model.best_action()) ++wrong;
    total_samples += stats.count;
  }
  const double rate = static_cast<double>(wrong) / reps;
  return {rate <= 0.1 && unfinished == 0,
          fmt("misidentified %zu/%zu (rate %.4f, bound 0.1), mean samples to accept %.1f", wrong, reps, rate,
              static_cast<double>(total_samples) / reps)};
}

Verdict rollout_vs_dp() {
  const TabularModel chain = TabularModel::chain(5, 0.9);
  const Policy policy = threshold_policy(2, 0, 4, 2.5, 0, 1);
  const std::vector<std::size_t> table{0, 0, 0, 1, 1};
  double worst = 0;
  for (int horizon : {1, 2, 5, 12}) {
    const auto q = finite_horizon_q(chain, table, horizon, 0.9);
    for (std::size_t s = 0; s < 5; ++s) {
      const auto sample = sample_state(chain, StateVector{static_cast<double>(s)}, policy, {horizon, 0.9},
                                       RandomStream(horizon * 10 + s));
      for (std::size_t a = 0; a < 2; ++a) worst = std::max(worst, std::abs(sample[a] - q[s][a]));
    }
  }

  const TabularModel noisy = TabularModel::chain(5, 0.9, 0.5);
  const auto q = finite_horizon_q(noisy, table, 12, 0.9);
  const std::size_t n = 100000;
  const RandomStream root(77);
  double sum = 0, sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng = root.split(i);
    const double v = rollout(noisy, StateVector{1.0}, ActionId{1}, policy, {12, 0.9}, rng);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq - n * mean * mean) / (n - 1) / n);
  const double z = std::abs(mean - q[1][1]) / se;
  return {worst <= 1e-12 && z <= 3.0,
          fmt("deterministic max error %.3g (tol 1e-12); noisy mean %.6f vs DP %.6f, %.2f SE (limit 3)", worst, mean,
              q[1][1], z)};
}

Verdict dynamics() {
  PendulumParams quiet;
  quiet.noise_half_width = 0.0;
  RandomStream rng(1);
  StateVector s{0.0, 0.0};
  bool still = true;
  for (int t = 0; t < 1000; ++t) {
    const auto out = pendulum_step(quiet, s, ActionId{1}, rng);
    still = still && out.next_state == StateVector{0.0, 0.0} && out.reward == 0.0 && !out.terminal;
    s = out.next_state;
  }
  const double acc = pendulum_angular_acceleration(quiet, 0.1, 0.0, 50.0);
  const double expected = -7.040534551551605;
  const double rel = std::abs(acc - expected) / std::abs(expected);

  MountainCarParams car;
  car.noise_half_width = 0.0;
  const auto step = mountaincar_step(car, StateVector{0.0, 0.0}, ActionId{0}, rng);
  const bool car_exact = step.next_state[0] == -0.0015 && step.next_state[1] == -0.0015 && step.reward == -1.0;
  const auto wall = mountaincar_step(car, StateVector{-1.19, -0.07}, ActionId{2}, rng);
  const bool reset = wall.next_state[0] == car.min_position && wall.next_state[1] == 0.0;

  return {still && rel <= 1e-6 && car_exact && reset,
          fmt("equilibrium %s; theta_ddot %.12f rel err %.2g; car step (%.17g, %.17g); left-bound reset %s",
              still ? "held" : "drifted", acc, rel, step.next_state[0], step.next_state[1], reset ? "ok" : "missing")};
}

struct EfficiencyRun {
  std::size_t samples = 0;
  std::size_t accepted = 0;
  std::size_t correct = 0;
};

Verdict sample_efficiency() {
  const GapBanditModel model(3, {0.0, 0.4}, 0.5);
  const Policy policy = Policy::uniform(3);
  const std::size_t reps = 20, pool = 50, target = 20;
  const StateSource source = [&model](RandomStream& r) { return model.draw_rollout_state(r); };

  auto rspi = [&](std::string_view rule, const RandomStream& rng) {
    CollectConfig cfg;
    cfg.max_states = target;
    cfg.max_samples = 1000000;
    cfg.delta = 0.1;
    cfg.gap_range = 1.0;
    cfg.pool_size = pool;
    cfg.rule = SelectionRule::parse(rule);
    cfg.rollout = {1, 1.0};
    const auto out = collect_training_set_rspi(model, policy, cfg, source, rng);
    EfficiencyRun run{out.report.state_samples, out.report.accepted, 0};
    for (const auto& rec : out.report.records) run.correct += rec.action.index == model.best_action() ? 1 : 0;
    return run;
  };

  // Smallest K at which the fixed allocation accepts `target` of the pool.
  auto rcpi = [&](const RandomStream& rng) {
    std::vector<StateVector> states;
    for (std::size_t i = 0; i < pool; ++i) states.push_back(StateVector{i < pool / 2 ? 0.0 : 0.4, 0.0});
    CollectConfig cfg;
    cfg.delta = 0.1;
    cfg.gap_range = 1.0;
    cfg.rollout = {1, 1.0};
    for (std::size_t k = 1; k <= 400; ++k) {
      const auto out = collect_training_set_rcpi(model, policy, states, k, cfg, rng);
      if (out.report.accepted >= target) {
        EfficiencyRun run{out.report.state_samples, out.report.accepted, 0};
        for (const auto& rec : out.report.records) run.correct += rec.action.index == model.best_action() ? 1 : 0;
        return run;
      }
    }
    return EfficiencyRun{pool * 400, 0, 0};
  };

  double count_sum = 0, ucb_sum = 0, rcpi_sum = 0;
  double count_ratio = 0, ucb_ratio = 0;
  std::size_t labels = 0, correct = 0;
  bool all_reached = true;
  const RandomStream root(4242);
  for (std::size_t r = 0; r < reps; ++r) {
    const RandomStream rep = root.split(r);
    const auto c = rspi("count", rep.split("count"));
    const auto u = rspi("ucb1a", rep.split("ucb1a"));
    const auto f = rcpi(rep.split("rcpi"));
    all_reached = all_reached && c.accepted == target && u.accepted == target && f.accepted >= target;
    count_sum += c.samples;
    ucb_sum += u.samples;
    rcpi_sum += f.samples;
    count_ratio += static_cast<double>(c.samples) / f.samples;
    ucb_ratio += static_cast<double>(u.samples) / f.samples;
    labels += c.accepted + u.accepted;
    correct += c.correct + u.correct;
  }
  count_ratio /= reps;
  ucb_ratio /= reps;
  const double accuracy = static_cast<double>(correct) / labels;
  const bool pass = all_reached && count_ratio <= 0.5 && ucb_ratio <= 0.5 && ucb_sum <= count_sum && accuracy >= 0.9;
  return {pass, fmt("mean state-samples count %.1f, ucb1a %.1f, rcpi %.1f; ratio to rcpi count %.3f, ucb1a %.3f "
                    "(limit 0.5); label accuracy %.4f",
                    count_sum / reps, ucb_sum / reps, rcpi_sum / reps, count_ratio, ucb_ratio, accuracy)};
}

Verdict end_to_end(const std::string& domain, double delta, bool cap_samples) {
  std::size_t successes = 0;
  std::uint64_t best_m = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Config cfg;
    cfg.set("domain", domain);
    cfg.set("method", "rspi");
    cfg.set("rule", "ucb1a");
    cfg.set("maxs", "100");
    cfg.set("maxr", "200");
    cfg.set("delta", format_real(delta));
    cfg.set("max_iterations", "10");
    cfg.set("seed", std::to_string(seed));
    cfg.set("wall_time", "false");
    const RunOutput out = run_single(cfg);
    const bool ok = out.record.success && (!cap_samples || out.record.m_total <= 2000);
    if (ok) {
      if (successes == 0 || out.record.m_total < best_m) best_m = out.record.m_total;
      ++successes;
    }
    per_seed += fmt("%sseed %llu: %s metric %lld m %llu", per_seed.empty() ? "" : "; ",
                    static_cast<unsigned long long>(seed), out.record.success ? "success" : "fail",
                    static_cast<long long>(out.record.metric), static_cast<unsigned long long>(out.record.m_total));
  }
  return {successes >= 1, fmt("%zu/5 seeds succeeded", successes) + (successes ? fmt(", fewest samples %llu", static_cast<unsigned long long>(best_m)) : "") + " (" + per_seed + ")"};
}

Verdict gradient_check() {
  RandomStream rng(99);
  const StateBox box{{-1.0, -2.0}, {1.0, 2.0}};
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    MlpParams p = MlpParams::zeros(2, 10, 3, box);
    auto w = p.flatten();
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);
    p.assign(w);
    const StateVector s{rng.uniform(-1, 1), rng.uniform(-2, 2)};
    const ActionId target{rng.uniform_index(3)};
    std::vector<double> analytic;
    loss_and_gradient(p, s, target, &analytic);
    double diff = 0, na = 0, nn = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      auto plus = w, minus = w;
      plus[k] += 1e-5;
      minus[k] -= 1e-5;
      MlpParams pp = p, pm = p;
      pp.assign(plus);
      pm.assign(minus);
      const double num =
          (loss_and_gradient(pp, s, target, nullptr) - loss_and_gradient(pm, s, target, nullptr)) / 2e-5;
      diff += (num - analytic[k]) * (num - analytic[k]);
      na += analytic[k] * analytic[k];
      nn += num * num;
    }
    worst = std::max(worst, std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12}));
  }
  return {worst <= 1e-6, fmt("worst relative error %.3g over 100 instances (limit 1e-6)", worst)};
}

Verdict determinism() {
  Config cfg;
  cfg.parse_text(
      "domain=pendulum\nseed=31337\nwall_time=false\nmax_iterations=3\neval_episodes=20\n"
      "grid.methods=rspi\ngrid.rules=count,ucb1a,ucb1b,succel\ngrid.maxs=20\ngrid.maxr=60\ngrid.delta=0.1\n"
      "grid.seeds=2\n");
  const ExperimentGrid grid = ExperimentGrid::from_config(cfg);
  auto csv = [&] {
    std::ostringstream os;
    write_records(os, run_grid(grid, 1));
    return os.str();
  };
  const std::string a = csv();
  const std::string b = csv();
  const auto rows = std::count(a.begin(), a.end(), '\n') - 1;
  return {a == b && rows == 8, fmt("%zu cells x %zu seeds, %ld rows, %zu bytes, %s", grid.cells.size(),
                                    grid.seeds_per_cell, static_cast<long>(rows), a.size(),
                                    a == b ? "byte-identical" : "DIFFERENT")};
}

Verdict invariants() {
  std::size_t passed = 0;
  std::string failures;
  for (const auto& prop : all_properties()) {
    const auto r = prop.check(777, 300);
    if (r.ok) ++passed;
    else failures += " " + prop.name + ": " + r.detail + ";";
  }
  return {passed == all_properties().size(),
          fmt("%zu/%zu properties hold", passed, all_properties().size()) + failures};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 1;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "stopping-gate soundness", gate_soundness},
      {2, "rollout estimator vs DP", rollout_vs_dp},
      {3, "dynamics checks", dynamics},
      {4, "sample efficiency", sample_efficiency},
      {5, "pendulum end-to-end", [] { return end_to_end("pendulum", 0.1, true); }},
      {6, "mountain-car end-to-end", [] { return end_to_end("mountain-car", 0.5, false); }},
      {7, "gradient check", gradient_check},
      {8, "determinism", determinism},
      {9, "invariant suite", invariants},
  };

  bool all = true;
  bool ran = false;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && v.pass;
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 1;
  }
  return all ? 0 : 1;
}
