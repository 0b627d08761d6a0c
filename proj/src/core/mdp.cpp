#include "core/mdp.hpp"

#include <cmath>
#include <string>

#include "core/classifier.hpp"
#include "core/errors.hpp"

namespace rspi {

bool StateVector::is_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void RolloutConfig::validate() const {
  if (horizon < 1) throw InvalidInput("rollout horizon must be >= 1, got " + std::to_string(horizon));
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidInput("discount must lie in (0, 1], got " + std::to_string(gamma));
}

void GenerativeModel::check_state(const StateVector& s) const {
  if (s.size() != state_dim()) {
    throw InvalidInput(std::string(name()) + ": state has dimension " + std::to_string(s.size()) + ", expected " +
                       std::to_string(state_dim()));
  }
  if (!s.is_finite()) throw InvalidInput(std::string(name()) + ": state has non-finite components");
}

void GenerativeModel::check_action(ActionId a) const {
  if (a.index >= num_actions()) {
    throw InvalidInput(std::string(name()) + ": action " + std::to_string(a.index) + " out of range [0, " +
                       std::to_string(num_actions()) + ")");
  }
}

double discounted_return(std::span<const double> rewards, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidInput("discount must lie in (0, 1]");
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    if (!std::isfinite(r)) throw InvalidInput("non-finite reward in sequence");
    total += weight * r;
    weight *= gamma;
  }
  return total;
}

double rollout(const GenerativeModel& model, const StateVector& s, ActionId a, const Policy& policy,
               const RolloutConfig& cfg, RandomStream& rng) {
  cfg.validate();
  model.check_state(s);
  model.check_action(a);

  // The absorbing state contributes zero reward, so stopping at termination
  // gives the same value as running the full horizon.
  StepOutcome out = model.step(s, a, rng);
  double total = out.reward;
  double weight = 1.0;
  for (int t = 1; t < cfg.horizon && !out.terminal; ++t) {
    const ActionId next = policy.act(out.next_state, rng);
    out = model.step(out.next_state, next, rng);
    weight *= cfg.gamma;
    total += weight * out.reward;
  }
  return total;
}

QSampleVector sample_state(const GenerativeModel& model, const StateVector& s, const Policy& policy,
                           const RolloutConfig& cfg, const RandomStream& rng) {
  model.check_state(s);
  if (model.is_terminal(s)) throw InvalidInput("sample_state called on a terminal state");
  QSampleVector q(model.num_actions());
  for (std::size_t k = 0; k < q.size(); ++k) {
    RandomStream action_stream = rng.split(static_cast<std::uint64_t>(k));
    q[k] = rollout(model, s, ActionId{k}, policy, cfg, action_stream);
  }
  return q;
}

}  // namespace rspi
