#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "core/allocator.hpp"
#include "core/classifier.hpp"
#include "core/mdp.hpp"

namespace rspi {

struct CollectConfig {
  std::size_t max_states = 10;     // maxs: accepted training states per round
  std::size_t max_samples = 10;    // maxr: state-samples per round
  double delta = 0.1;
  double gap_range = 1.0;
  std::size_t pool_size = 0;       // N; 0 means max_states
  SelectionRule rule;
  bool rejection = false;
  RolloutConfig rollout;

  [[nodiscard]] std::size_t effective_pool_size() const { return pool_size == 0 ? max_states : pool_size; }
  [[nodiscard]] GateParams gate(std::size_t num_actions) const { return {delta, gap_range, num_actions}; }
  void validate() const;
};

struct AcceptedState {
  StateVector state;
  ActionId action;
  std::size_t count = 0;
  double d_hat = 0.0;
};

struct SamplingReport {
  std::size_t accepted = 0;        // n
  std::size_t state_samples = 0;   // m
  std::size_t rollouts = 0;        // m * num_actions
  std::size_t rejections = 0;
  std::vector<AcceptedState> records;
};

struct Collection {
  TrainingSet examples;
  SamplingReport report;
};

/// Adaptive, bandit-managed collection. Every sample_state call at pool
/// state `id` with prior count c uses rng.split("sample").split(id).split(c).
Collection collect_training_set_rspi(const GenerativeModel& model, const Policy& policy, const CollectConfig& cfg,
                                     const StateSource& source, const RandomStream& rng);

/// Fixed allocation: exactly `per_state` sample_state calls at every state,
/// then one acceptance test on the final statistics.
Collection collect_training_set_rcpi(const GenerativeModel& model, const Policy& policy,
                                     const std::vector<StateVector>& states, std::size_t per_state,
                                     const CollectConfig& cfg, const RandomStream& rng);

/// Mean discounted return over `episodes` runs from initial_eval_state(),
/// each at most `horizon` steps. Episode k uses rng.split(k).
double policy_performance(const GenerativeModel& model, const Policy& policy, std::size_t episodes, int horizon,
                          double gamma, const RandomStream& rng);

enum class Method { Rspi, Rcpi };

Method parse_method(std::string_view name);
std::string_view method_name(Method m);

struct IterationConfig {
  Method method = Method::Rspi;
  CollectConfig collect;
  TrainConfig train;
  std::size_t rcpi_per_state = 0;   // K; 0 means max(1, max_samples / pool size)
  std::size_t max_iterations = 10;
  std::size_t eval_episodes = 100;
  int eval_horizon = 0;             // 0 means model default
  double perf_tolerance = -1.0;     // < 0 means 0.01 * gap_range
  std::size_t min_train_states = 5;

  [[nodiscard]] std::size_t rcpi_samples_per_state() const;
  [[nodiscard]] double tolerance() const { return perf_tolerance < 0 ? 0.01 * collect.gap_range : perf_tolerance; }
  void validate() const;
};

enum class IterationOutcome { Improved, NoImprovement, TooFewStates, TrainingFailed };

std::string_view outcome_name(IterationOutcome o);

struct IterationRecord {
  std::size_t iteration = 0;
  SamplingReport report;
  std::optional<Policy> policy;        // trained policy, if training ran
  double old_performance = 0.0;
  double new_performance = 0.0;        // NaN when no policy was trained
  bool improved = false;
  bool best = false;                   // policy with highest estimated performance in the run
  IterationOutcome outcome = IterationOutcome::NoImprovement;
};

struct PolicyIterationResult {
  std::vector<IterationRecord> iterations;
  Policy best_policy;
  double best_performance = 0.0;
  std::size_t total_state_samples = 0;
  std::size_t total_rollouts = 0;
};

/// Collect / train / evaluate from the uniform-random policy until the new
/// policy fails to beat the old one by more than the tolerance, a round yields
/// too few accepted states, or max_iterations is reached. All policies are
/// evaluated with the same evaluation stream.
PolicyIterationResult run_policy_iteration(const GenerativeModel& model, const IterationConfig& cfg,
                                           const RandomStream& rng);

}  // namespace rspi
