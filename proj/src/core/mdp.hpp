#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "core/random.hpp"

namespace rspi {

class Policy;

/// Continuous state. Length is fixed by the owning model.
class StateVector {
 public:
  StateVector() = default;
  StateVector(std::initializer_list<double> values) : values_(values) {}
  explicit StateVector(std::vector<double> values) : values_(std::move(values)) {}

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] bool is_finite() const noexcept;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<double> values_;
};

/// Index of a discrete action in [0, num_actions).
struct ActionId {
  std::size_t index = 0;
  friend auto operator<=>(const ActionId&, const ActionId&) = default;
};

struct StepOutcome {
  StateVector next_state;
  double reward = 0.0;
  bool terminal = false;
};

struct RewardBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Axis-aligned box over the state space.
struct StateBox {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct RolloutConfig {
  int horizon = 1;     // T, number of simulated steps per trajectory
  double gamma = 1.0;  // discount in (0, 1]

  void validate() const;
};

/// One single-trajectory return per action, from one call to sample_state().
using QSampleVector = std::vector<double>;

/// Generative model: given (state, action) samples a next state and reward.
/// Implementations are immutable after construction and step() is pure given
/// the stream, so one instance may be shared by concurrent rollouts.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  [[nodiscard]] virtual std::string_view name() const = 0;
  [[nodiscard]] virtual std::size_t state_dim() const = 0;
  [[nodiscard]] virtual std::size_t num_actions() const = 0;
  [[nodiscard]] virtual RewardBounds reward_bounds() const = 0;
  // b2 - b1 used by the acceptance test.
  [[nodiscard]] virtual double gap_range() const = 0;
  [[nodiscard]] virtual double discount() const = 0;
  [[nodiscard]] virtual int default_horizon() const = 0;
  [[nodiscard]] virtual int evaluation_horizon() const = 0;
  // Box rollout states are drawn from; also the classifier's input normalization.
  [[nodiscard]] virtual StateBox rollout_box() const = 0;

  [[nodiscard]] virtual bool is_terminal(const StateVector& s) const = 0;
  // Throws InvalidInput on a terminal or malformed state.
  virtual StepOutcome step(const StateVector& s, ActionId a, RandomStream& rng) const = 0;
  virtual StateVector draw_rollout_state(RandomStream& rng) const = 0;
  virtual StateVector initial_eval_state(RandomStream& rng) const = 0;

  void check_state(const StateVector& s) const;
  void check_action(ActionId a) const;
};

/// Sum of gamma^t * rewards[t].
double discounted_return(std::span<const double> rewards, double gamma);

/// Single trajectory from s: first action a, then the policy, for at most
/// cfg.horizon steps or until termination. Returns its discounted return.
double rollout(const GenerativeModel& model, const StateVector& s, ActionId a, const Policy& policy,
               const RolloutConfig& cfg, RandomStream& rng);

/// One rollout per action at s. Action k uses rng.split(k), so the samples are
/// independent and do not depend on evaluation order.
QSampleVector sample_state(const GenerativeModel& model, const StateVector& s, const Policy& policy,
                           const RolloutConfig& cfg, const RandomStream& rng);

}  // namespace rspi
