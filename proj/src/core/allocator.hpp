#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/mdp.hpp"

namespace rspi {

/// Running statistics for one candidate rollout state.
struct StateStats {
  StateVector state;
  std::uint64_t id = 0;     // unique within a collection round, keys the state's random streams
  std::size_t count = 0;    // number of sample_state calls at this state
  std::vector<double> q_mean;
  ActionId a_hat{0};        // empirical best action, ties to lowest index
  double d_hat = 0.0;       // empirical best minus empirical second best
  double utility = 0.0;

  static StateStats fresh(StateVector state, std::uint64_t id, std::size_t num_actions);
};

enum class RuleKind { Count, Ucb1a, Ucb1b, SuccEl };

struct SelectionRule {
  RuleKind kind = RuleKind::Count;
  // SuccEl only: fixed elimination threshold on the optimistic gap. When unset
  // the threshold is derived from the remaining sample budget.
  std::optional<double> elimination_threshold;

  static SelectionRule parse(std::string_view name);
  [[nodiscard]] std::string_view name() const;
};

/// Parameters of the acceptance gate: accept when
/// 2 c d_hat^2 >= gap_range^2 ln((num_actions - 1) / delta).
struct GateParams {
  double delta = 0.1;
  double gap_range = 1.0;
  std::size_t num_actions = 2;

  void validate() const;
  // Right-hand side gap_range^2 ln((num_actions - 1) / delta).
  [[nodiscard]] double log_term() const;
};

using StateSource = std::function<StateVector(RandomStream&)>;

/// Constant-size pool of candidate states, treated as bandit arms.
struct StatePool {
  std::vector<StateStats> entries;
  std::size_t total_samples = 0;     // m: sample_state calls across the pool, ever
  std::uint64_t next_id = 0;
  std::size_t retired_samples = 0;   // samples spent on states no longer pooled

  // Draws `size` states from source, state id k using base.split(k).
  static StatePool draw(std::size_t size, std::size_t num_actions, const StateSource& source,
                        const RandomStream& base);

  [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
  [[nodiscard]] std::size_t live_samples() const;
};

/// Folds one QSampleVector into the running means and recomputes a_hat, d_hat.
void update_stats(StateStats& stats, const std::vector<double>& q);

double utility(const StateStats& stats, const SelectionRule& rule, std::size_t m);

/// Recomputes every entry's utility for the pool's current m.
void refresh_utilities(StatePool& pool, const SelectionRule& rule);

/// Index of the maximum-utility entry, ties to the lowest index. Throws
/// StateError on an empty pool.
std::size_t select_state(const StatePool& pool, const SelectionRule& rule);

bool stop_accept(const StateStats& stats, const GateParams& gate);

/// Smallest count at which a state with empirical gap d_hat passes the gate.
std::optional<std::size_t> samples_to_accept(double d_hat, const GateParams& gate);

/// Replaces entry `index` with a fresh state from source, keyed by a new id.
void admit_replacement(StatePool& pool, std::size_t index, const StateSource& source, const RandomStream& base);

struct RejectionParams {
  bool enabled = false;
  GateParams gate;
  std::size_t remaining_budget = 0;  // state-samples left in the round
};

/// Confidence radius used by successive elimination.
double elimination_radius(std::size_t count, std::size_t m, const GateParams& gate);
/// Gap a SuccEl state must be able to reach to pass the gate within the remaining budget.
double elimination_threshold(const StateStats& stats, const SelectionRule& rule, const RejectionParams& params);

/// Replaces hopeless states. Returns the number of replacements.
std::size_t reject_hopeless(StatePool& pool, const SelectionRule& rule, const RejectionParams& params,
                            const StateSource& source, const RandomStream& base);

}  // namespace rspi
