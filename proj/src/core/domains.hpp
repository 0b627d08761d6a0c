#pragma once

#include <memory>
#include <string_view>

#include "core/mdp.hpp"

namespace rspi {

/// Inverted pendulum on a cart. Actions: 0 = left force, 1 = no force, 2 = right force.
struct PendulumParams {
  double gravity = 9.8;        // m/s^2
  double pole_mass = 2.0;      // kg
  double cart_mass = 8.0;      // kg
  double pole_length = 0.5;    // m
  double dt = 0.1;             // s
  double force = 50.0;         // N
  double noise_half_width = 10.0;  // N, uniform noise on the applied force
  double gamma = 0.95;
  int horizon = 90;            // rollout horizon, gamma^T <= 0.01
  int eval_horizon = 1000;
  double max_angular_velocity = 5.0;   // rollout box |theta_dot| bound
  double initial_perturbation = 0.05;  // evaluation start jitter on both components

  [[nodiscard]] double alpha() const { return 1.0 / (pole_mass + cart_mass); }
  void validate() const;
};

/// Mountain car. Actions: 0 = forward throttle (+1), 1 = none, 2 = reverse (-1).
struct MountainCarParams {
  double min_position = -1.2;
  double max_position = 0.5;
  double max_speed = 0.07;
  double power = 0.001;
  double hill = 0.0025;
  double noise_half_width = 0.2;
  double gamma = 0.99;
  double gap_range = 1.0;
  int horizon = 500;
  int eval_horizon = 500;
  double start_position = -0.5;
  double start_velocity = 0.0;

  void validate() const;
};

/// Angular acceleration of the pole for control force u.
double pendulum_angular_acceleration(const PendulumParams& p, double theta, double theta_dot, double u);

StepOutcome pendulum_step(const PendulumParams& p, const StateVector& s, ActionId a, RandomStream& rng);
StepOutcome mountaincar_step(const MountainCarParams& p, const StateVector& s, ActionId a, RandomStream& rng);

class PendulumModel final : public GenerativeModel {
 public:
  explicit PendulumModel(PendulumParams params = {});

  [[nodiscard]] const PendulumParams& params() const noexcept { return params_; }

  [[nodiscard]] std::string_view name() const override { return "pendulum"; }
  [[nodiscard]] std::size_t state_dim() const override { return 2; }
  [[nodiscard]] std::size_t num_actions() const override { return 3; }
  [[nodiscard]] RewardBounds reward_bounds() const override { return {-1.0, 0.0}; }
  [[nodiscard]] double gap_range() const override { return 1.0; }
  [[nodiscard]] double discount() const override { return params_.gamma; }
  [[nodiscard]] int default_horizon() const override { return params_.horizon; }
  [[nodiscard]] int evaluation_horizon() const override { return params_.eval_horizon; }
  [[nodiscard]] StateBox rollout_box() const override;

  [[nodiscard]] bool is_terminal(const StateVector& s) const override;
  StepOutcome step(const StateVector& s, ActionId a, RandomStream& rng) const override;
  StateVector draw_rollout_state(RandomStream& rng) const override;
  StateVector initial_eval_state(RandomStream& rng) const override;

 private:
  PendulumParams params_;
};

class MountainCarModel final : public GenerativeModel {
 public:
  explicit MountainCarModel(MountainCarParams params = {});

  [[nodiscard]] const MountainCarParams& params() const noexcept { return params_; }

  [[nodiscard]] std::string_view name() const override { return "mountain-car"; }
  [[nodiscard]] std::size_t state_dim() const override { return 2; }
  [[nodiscard]] std::size_t num_actions() const override { return 3; }
  [[nodiscard]] RewardBounds reward_bounds() const override { return {-1.0, 0.0}; }
  [[nodiscard]] double gap_range() const override { return params_.gap_range; }
  [[nodiscard]] double discount() const override { return params_.gamma; }
  [[nodiscard]] int default_horizon() const override { return params_.horizon; }
  [[nodiscard]] int evaluation_horizon() const override { return params_.eval_horizon; }
  [[nodiscard]] StateBox rollout_box() const override;

  [[nodiscard]] bool is_terminal(const StateVector& s) const override;
  StepOutcome step(const StateVector& s, ActionId a, RandomStream& rng) const override;
  StateVector draw_rollout_state(RandomStream& rng) const override;
  StateVector initial_eval_state(RandomStream& rng) const override;

 private:
  MountainCarParams params_;
};

}  // namespace rspi
