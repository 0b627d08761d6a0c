#include "core/allocator.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace rspi {

StateStats StateStats::fresh(StateVector state, std::uint64_t id, std::size_t num_actions) {
  StateStats s;
  s.state = std::move(state);
  s.id = id;
  s.q_mean.assign(num_actions, 0.0);
  return s;
}

SelectionRule SelectionRule::parse(std::string_view name) {
  if (name == "count") return {RuleKind::Count, std::nullopt};
  if (name == "ucb1a") return {RuleKind::Ucb1a, std::nullopt};
  if (name == "ucb1b") return {RuleKind::Ucb1b, std::nullopt};
  if (name == "succel") return {RuleKind::SuccEl, std::nullopt};
  throw InvalidInput("unknown selection rule '" + std::string(name) + "' (expected count, ucb1a, ucb1b or succel)");
}

std::string_view SelectionRule::name() const {
  switch (kind) {
    case RuleKind::Count: return "count";
    case RuleKind::Ucb1a: return "ucb1a";
    case RuleKind::Ucb1b: return "ucb1b";
    case RuleKind::SuccEl: return "succel";
  }
  return "count";
}

void GateParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (!(gap_range > 0.0) || !std::isfinite(gap_range)) throw InvalidInput("gap range must be positive");
  if (num_actions < 2) throw InvalidInput("acceptance test needs at least two actions");
}

double GateParams::log_term() const {
  return gap_range * gap_range * std::log(static_cast<double>(num_actions - 1) / delta);
}

StatePool StatePool::draw(std::size_t size, std::size_t num_actions, const StateSource& source,
                          const RandomStream& base) {
  StatePool pool;
  pool.entries.reserve(size);
  for (std::size_t k = 0; k < size; ++k) {
    RandomStream stream = base.split(pool.next_id);
    pool.entries.push_back(StateStats::fresh(source(stream), pool.next_id, num_actions));
    ++pool.next_id;
  }
  return pool;
}

std::size_t StatePool::live_samples() const {
  std::size_t total = 0;
  for (const auto& e : entries) total += e.count;
  return total;
}

void update_stats(StateStats& stats, const std::vector<double>& q) {
  if (q.size() != stats.q_mean.size()) {
    throw InvalidInput("update_stats: sample has " + std::to_string(q.size()) + " actions, expected " +
                       std::to_string(stats.q_mean.size()));
  }
  ++stats.count;
  const double n = static_cast<double>(stats.count);
  for (std::size_t a = 0; a < q.size(); ++a) stats.q_mean[a] += (q[a] - stats.q_mean[a]) / n;

  std::size_t best = 0;
  for (std::size_t a = 1; a < q.size(); ++a) {
    if (stats.q_mean[a] > stats.q_mean[best]) best = a;
  }
  stats.a_hat = ActionId{best};
  if (q.size() < 2) {
    stats.d_hat = 0.0;
    return;
  }
  double runner_up = -INFINITY;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (a != best) runner_up = std::max(runner_up, stats.q_mean[a]);
  }
  stats.d_hat = std::max(0.0, stats.q_mean[best] - runner_up);
}

double utility(const StateStats& stats, const SelectionRule& rule, std::size_t m) {
  const double c = static_cast<double>(stats.count);
  switch (rule.kind) {
    case RuleKind::Count:
    case RuleKind::SuccEl:
      return -c;
    case RuleKind::Ucb1a:
      return stats.d_hat + std::sqrt(1.0 / (1.0 + c));
    case RuleKind::Ucb1b: {
      const double log_m = m < 1 ? 0.0 : std::max(0.0, std::log(static_cast<double>(m)));
      return stats.d_hat + std::sqrt(log_m / (1.0 + c));
    }
  }
  return -c;
}

void refresh_utilities(StatePool& pool, const SelectionRule& rule) {
  for (auto& e : pool.entries) e.utility = utility(e, rule, pool.total_samples);
}

std::size_t select_state(const StatePool& pool, const SelectionRule& rule) {
  if (pool.entries.empty()) throw StateError("select_state: pool is empty");
  std::size_t best = 0;
  double best_u = utility(pool.entries[0], rule, pool.total_samples);
  for (std::size_t i = 1; i < pool.entries.size(); ++i) {
    const double u = utility(pool.entries[i], rule, pool.total_samples);
    if (u > best_u) {
      best = i;
      best_u = u;
    }
  }
  return best;
}

bool stop_accept(const StateStats& stats, const GateParams& gate) {
  gate.validate();
  if (stats.count < 1) return false;
  return 2.0 * static_cast<double>(stats.count) * stats.d_hat * stats.d_hat >= gate.log_term();
}

std::optional<std::size_t> samples_to_accept(double d_hat, const GateParams& gate) {
  gate.validate();
  if (!(d_hat > 0.0)) return std::nullopt;
  const double c = std::ceil(gate.log_term() / (2.0 * d_hat * d_hat));
  auto count = static_cast<std::size_t>(std::max(1.0, c));
  // Guard against rounding at the boundary.
  while (count > 1 && 2.0 * static_cast<double>(count - 1) * d_hat * d_hat >= gate.log_term()) --count;
  while (2.0 * static_cast<double>(count) * d_hat * d_hat < gate.log_term()) ++count;
  return count;
}

void admit_replacement(StatePool& pool, std::size_t index, const StateSource& source, const RandomStream& base) {
  if (index >= pool.entries.size()) throw InvalidInput("admit_replacement: index out of range");
  StateStats& slot = pool.entries[index];
  pool.retired_samples += slot.count;
  RandomStream stream = base.split(pool.next_id);
  slot = StateStats::fresh(source(stream), pool.next_id, slot.q_mean.size());
  ++pool.next_id;
}

double elimination_radius(std::size_t count, std::size_t m, const GateParams& gate) {
  const double m_eff = static_cast<double>(std::max<std::size_t>(m, 2));
  const double c_eff = static_cast<double>(std::max<std::size_t>(count, 1));
  return gate.gap_range * std::sqrt(std::log(m_eff * static_cast<double>(gate.num_actions) / gate.delta) / (2.0 * c_eff));
}

double elimination_threshold(const StateStats& /*stats*/, const SelectionRule& rule, const RejectionParams& params) {
  if (rule.elimination_threshold) return *rule.elimination_threshold;
  // Gap the gate needs over the samples left in the round. Measuring from
  // c + remaining instead would never eliminate: the radius at c already
  // exceeds the gate's gap at every count >= c.
  if (params.remaining_budget == 0) return 0.0;
  return std::sqrt(params.gate.log_term() / (2.0 * static_cast<double>(params.remaining_budget)));
}

std::size_t reject_hopeless(StatePool& pool, const SelectionRule& rule, const RejectionParams& params,
                            const StateSource& source, const RandomStream& base) {
  std::size_t replaced = 0;
  if (rule.kind == RuleKind::SuccEl) {
    for (std::size_t i = 0; i < pool.entries.size(); ++i) {
      const StateStats& e = pool.entries[i];
      if (e.count == 0) continue;
      const double optimistic = e.d_hat + elimination_radius(e.count, pool.total_samples, params.gate);
      if (optimistic < elimination_threshold(e, rule, params)) {
        admit_replacement(pool, i, source, base);
        ++replaced;
      }
    }
    refresh_utilities(pool, rule);
    return replaced;
  }

  if (!params.enabled) return 0;
  const double m = static_cast<double>(pool.total_samples);
  const double threshold = m < 1.0 ? 0.0 : std::sqrt(std::max(0.0, std::log(m)));
  refresh_utilities(pool, rule);
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    if (pool.entries[i].utility < threshold) {
      admit_replacement(pool, i, source, base);
      ++replaced;
    }
  }
  refresh_utilities(pool, rule);
  return replaced;
}

}  // namespace rspi
