#include "core/engine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "core/errors.hpp"

namespace rspi {

namespace {

void emit_examples(TrainingSet& out, const StateStats& stats) {
  const std::size_t num_actions = stats.q_mean.size();
  out.push_back({stats.state, stats.a_hat, Polarity::Positive});
  for (std::size_t a = 0; a < num_actions; ++a) {
    if (a != stats.a_hat.index) out.push_back({stats.state, ActionId{a}, Polarity::Negative});
  }
}

}  // namespace

void CollectConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("collect: delta must lie in (0, 1)");
  if (!(gap_range > 0.0)) throw InvalidInput("collect: gap range must be positive");
  rollout.validate();
}

Collection collect_training_set_rspi(const GenerativeModel& model, const Policy& policy, const CollectConfig& cfg,
                                     const StateSource& source, const RandomStream& rng) {
  cfg.validate();
  const std::size_t num_actions = model.num_actions();
  const GateParams gate = cfg.gate(num_actions);
  gate.validate();

  Collection result;
  if (cfg.max_states == 0 || cfg.max_samples == 0) return result;

  const RandomStream draw_stream = rng.split("draw");
  const RandomStream sample_stream = rng.split("sample");
  StatePool pool = StatePool::draw(cfg.effective_pool_size(), num_actions, source, draw_stream);
  refresh_utilities(pool, cfg.rule);

  SamplingReport& report = result.report;
  while (report.accepted < cfg.max_states && pool.total_samples < cfg.max_samples) {
    const std::size_t i = select_state(pool, cfg.rule);
    StateStats& entry = pool.entries[i];
    const RandomStream stream = sample_stream.split(entry.id).split(static_cast<std::uint64_t>(entry.count));
    const QSampleVector q = sample_state(model, entry.state, policy, cfg.rollout, stream);
    update_stats(entry, q);
    ++pool.total_samples;
    refresh_utilities(pool, cfg.rule);

    if (stop_accept(entry, gate)) {
      emit_examples(result.examples, entry);
      report.records.push_back({entry.state, entry.a_hat, entry.count, entry.d_hat});
      ++report.accepted;
      admit_replacement(pool, i, source, draw_stream);
      refresh_utilities(pool, cfg.rule);
    }

    const RejectionParams rejection{cfg.rejection, gate, cfg.max_samples - pool.total_samples};
    report.rejections += reject_hopeless(pool, cfg.rule, rejection, source, draw_stream);
  }

  report.state_samples = pool.total_samples;
  report.rollouts = report.state_samples * num_actions;
  return result;
}

Collection collect_training_set_rcpi(const GenerativeModel& model, const Policy& policy,
                                     const std::vector<StateVector>& states, std::size_t per_state,
                                     const CollectConfig& cfg, const RandomStream& rng) {
  cfg.validate();
  if (per_state < 1) throw InvalidInput("rcpi: samples per state must be >= 1");
  const std::size_t num_actions = model.num_actions();
  const GateParams gate = cfg.gate(num_actions);
  gate.validate();

  const RandomStream sample_stream = rng.split("sample");
  Collection result;
  SamplingReport& report = result.report;
  for (std::size_t id = 0; id < states.size(); ++id) {
    StateStats stats = StateStats::fresh(states[id], id, num_actions);
    for (std::size_t k = 0; k < per_state; ++k) {
      const RandomStream stream = sample_stream.split(id).split(static_cast<std::uint64_t>(k));
      update_stats(stats, sample_state(model, stats.state, policy, cfg.rollout, stream));
      ++report.state_samples;
    }
    if (stop_accept(stats, gate)) {
      emit_examples(result.examples, stats);
      report.records.push_back({stats.state, stats.a_hat, stats.count, stats.d_hat});
      ++report.accepted;
    }
  }
  report.rollouts = report.state_samples * num_actions;
  return result;
}

double policy_performance(const GenerativeModel& model, const Policy& policy, std::size_t episodes, int horizon,
                          double gamma, const RandomStream& rng) {
  if (episodes < 1) throw InvalidInput("policy_performance: episodes must be >= 1");
  if (horizon < 1) throw InvalidInput("policy_performance: horizon must be >= 1");
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    RandomStream stream = rng.split(static_cast<std::uint64_t>(e));
    StateVector s = model.initial_eval_state(stream);
    double weight = 1.0;
    double ret = 0.0;
    for (int t = 0; t < horizon && !model.is_terminal(s); ++t) {
      StepOutcome out = model.step(s, policy.act(s, stream), stream);
      ret += weight * out.reward;
      weight *= gamma;
      if (out.terminal) break;
      s = std::move(out.next_state);
    }
    total += ret;
  }
  return total / static_cast<double>(episodes);
}

Method parse_method(std::string_view name) {
  if (name == "rspi") return Method::Rspi;
  if (name == "rcpi") return Method::Rcpi;
  throw InvalidInput("unknown method '" + std::string(name) + "' (expected rspi or rcpi)");
}

std::string_view method_name(Method m) { return m == Method::Rspi ? "rspi" : "rcpi"; }

std::string_view outcome_name(IterationOutcome o) {
  switch (o) {
    case IterationOutcome::Improved: return "improved";
    case IterationOutcome::NoImprovement: return "no-improvement";
    case IterationOutcome::TooFewStates: return "too-few-states";
    case IterationOutcome::TrainingFailed: return "training-failed";
  }
  return "unknown";
}

std::size_t IterationConfig::rcpi_samples_per_state() const {
  if (rcpi_per_state > 0) return rcpi_per_state;
  const std::size_t pool = collect.effective_pool_size();
  return pool == 0 ? 1 : std::max<std::size_t>(1, collect.max_samples / pool);
}

void IterationConfig::validate() const {
  collect.validate();
  if (collect.max_states < 1) throw InvalidInput("maxs must be >= 1");
  if (collect.max_samples < 1) throw InvalidInput("maxr must be >= 1");
  if (max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
  if (eval_episodes < 1) throw InvalidInput("eval_episodes must be >= 1");
  if (eval_horizon < 0) throw InvalidInput("eval_horizon must be non-negative");
  TrainConfig resolved = train;
  if (resolved.num_actions == 0) resolved.num_actions = 1;  // filled in from the model
  resolved.validate();
}

PolicyIterationResult run_policy_iteration(const GenerativeModel& model, const IterationConfig& cfg,
                                           const RandomStream& rng) {
  cfg.validate();
  const std::size_t num_actions = model.num_actions();
  const int eval_horizon = cfg.eval_horizon > 0 ? cfg.eval_horizon : model.evaluation_horizon();
  const RandomStream eval_stream = rng.split("evaluate");
  const StateSource source = [&model](RandomStream& s) { return model.draw_rollout_state(s); };

  auto evaluate = [&](const Policy& p) {
    return policy_performance(model, p, cfg.eval_episodes, eval_horizon, model.discount(), eval_stream);
  };

  PolicyIterationResult result{{}, Policy::uniform(num_actions), 0.0, 0, 0};
  Policy current = Policy::uniform(num_actions);
  double current_perf = evaluate(current);
  result.best_performance = current_perf;
  std::optional<std::size_t> best_index;

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const RandomStream iter_stream = rng.split("iteration").split(static_cast<std::uint64_t>(it));
    IterationRecord record;
    record.iteration = it;
    record.old_performance = current_perf;
    record.new_performance = std::numeric_limits<double>::quiet_NaN();

    Collection collected;
    if (cfg.method == Method::Rspi) {
      collected = collect_training_set_rspi(model, current, cfg.collect, source, iter_stream.split("collect"));
    } else {
      // Fresh fixed state set every iteration.
      const RandomStream draw = iter_stream.split("states");
      std::vector<StateVector> states;
      for (std::size_t k = 0; k < cfg.collect.effective_pool_size(); ++k) {
        RandomStream s = draw.split(static_cast<std::uint64_t>(k));
        states.push_back(model.draw_rollout_state(s));
      }
      collected = collect_training_set_rcpi(model, current, states, cfg.rcpi_samples_per_state(), cfg.collect,
                                            iter_stream.split("collect"));
    }
    record.report = std::move(collected.report);
    result.total_state_samples += record.report.state_samples;
    result.total_rollouts += record.report.rollouts;

    if (record.report.accepted < cfg.min_train_states) {
      record.outcome = IterationOutcome::TooFewStates;
      result.iterations.push_back(std::move(record));
      break;
    }

    TrainConfig train_cfg = cfg.train;
    train_cfg.num_actions = num_actions;
    if (train_cfg.normalization.lower.empty()) train_cfg.normalization = model.rollout_box();
    try {
      RandomStream train_stream = iter_stream.split("train");
      record.policy = Policy::classifier(train(collected.examples, train_cfg, train_stream));
    } catch (const InvalidInput&) {
      record.outcome = IterationOutcome::TrainingFailed;
      result.iterations.push_back(std::move(record));
      break;
    }

    record.new_performance = evaluate(*record.policy);
    record.improved = record.new_performance > current_perf + cfg.tolerance();
    record.outcome = record.improved ? IterationOutcome::Improved : IterationOutcome::NoImprovement;
    // Later policies win ties.
    if (record.new_performance >= result.best_performance) {
      result.best_performance = record.new_performance;
      result.best_policy = *record.policy;
      best_index = result.iterations.size();
    }
    const bool stop = !record.improved;
    if (!stop) {
      current = *record.policy;
      current_perf = record.new_performance;
    }
    result.iterations.push_back(std::move(record));
    if (stop) break;
  }

  if (best_index) result.iterations[*best_index].best = true;
  return result;
}

}  // namespace rspi
