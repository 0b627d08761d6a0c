#include "core/domains.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace rspi {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require(bool ok, const char* what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace

void PendulumParams::validate() const {
  require(gravity > 0 && pole_mass > 0 && cart_mass > 0 && pole_length > 0 && dt > 0,
          "pendulum: physical constants must be positive");
  require(force >= 0 && noise_half_width >= 0, "pendulum: force and noise must be non-negative");
  require(gamma > 0 && gamma <= 1, "pendulum: gamma must lie in (0, 1]");
  require(horizon >= 1 && eval_horizon >= 1, "pendulum: horizons must be >= 1");
  require(max_angular_velocity > 0, "pendulum: angular velocity box must be positive");
  require(initial_perturbation >= 0 && initial_perturbation <= kHalfPi, "pendulum: bad initial perturbation");
}

void MountainCarParams::validate() const {
  require(min_position < max_position, "mountain-car: position bounds out of order");
  require(max_speed > 0, "mountain-car: speed bound must be positive");
  require(noise_half_width >= 0, "mountain-car: noise must be non-negative");
  require(gamma > 0 && gamma <= 1, "mountain-car: gamma must lie in (0, 1]");
  require(gap_range > 0, "mountain-car: gap range must be positive");
  require(horizon >= 1 && eval_horizon >= 1, "mountain-car: horizons must be >= 1");
  require(start_position >= min_position && start_position < max_position, "mountain-car: start outside track");
  require(std::abs(start_velocity) <= max_speed, "mountain-car: start velocity out of bounds");
}

double pendulum_angular_acceleration(const PendulumParams& p, double theta, double theta_dot, double u) {
  const double alpha = p.alpha();
  const double ml = p.pole_mass * p.pole_length;
  const double c = std::cos(theta);
  const double numerator =
      p.gravity * std::sin(theta) - alpha * ml * theta_dot * theta_dot * std::sin(2.0 * theta) / 2.0 - alpha * c * u;
  const double denominator = 4.0 * p.pole_length / 3.0 - alpha * ml * c * c;
  return numerator / denominator;
}

StepOutcome pendulum_step(const PendulumParams& p, const StateVector& s, ActionId a, RandomStream& rng) {
  if (s.size() != 2 || !s.is_finite()) throw InvalidInput("pendulum: malformed state");
  if (std::abs(s[0]) > kHalfPi) throw InvalidInput("pendulum: step from a terminal state");
  if (a.index >= 3) throw InvalidInput("pendulum: action out of range");

  const std::array<double, 3> base{-p.force, 0.0, p.force};
  double u = base[a.index];
  if (p.noise_half_width > 0) u += rng.uniform(-p.noise_half_width, p.noise_half_width);

  // Semi-implicit Euler: the updated velocity moves the angle.
  const double acc = pendulum_angular_acceleration(p, s[0], s[1], u);
  const double theta_dot = s[1] + p.dt * acc;
  const double theta = s[0] + p.dt * theta_dot;

  StepOutcome out{StateVector{theta, theta_dot}, 0.0, false};
  if (std::abs(theta) > kHalfPi) {
    out.reward = -1.0;
    out.terminal = true;
  }
  return out;
}

StepOutcome mountaincar_step(const MountainCarParams& p, const StateVector& s, ActionId a, RandomStream& rng) {
  if (s.size() != 2 || !s.is_finite()) throw InvalidInput("mountain-car: malformed state");
  if (s[0] >= p.max_position) throw InvalidInput("mountain-car: step from a terminal state");
  if (a.index >= 3) throw InvalidInput("mountain-car: action out of range");

  const std::array<double, 3> base{1.0, 0.0, -1.0};
  double u = base[a.index];
  if (p.noise_half_width > 0) u += rng.uniform(-p.noise_half_width, p.noise_half_width);

  double velocity = std::clamp(s[1] + p.power * u - p.hill * std::cos(3.0 * s[0]), -p.max_speed, p.max_speed);
  const double position = std::clamp(s[0] + velocity, p.min_position, p.max_position);
  if (position <= p.min_position) velocity = 0.0;

  StepOutcome out{StateVector{position, velocity}, -1.0, false};
  if (position >= p.max_position) {
    out.reward = 0.0;
    out.terminal = true;
  }
  return out;
}

PendulumModel::PendulumModel(PendulumParams params) : params_(params) { params_.validate(); }

StateBox PendulumModel::rollout_box() const {
  return {{-kHalfPi, -params_.max_angular_velocity}, {kHalfPi, params_.max_angular_velocity}};
}

bool PendulumModel::is_terminal(const StateVector& s) const { return std::abs(s[0]) > kHalfPi; }

StepOutcome PendulumModel::step(const StateVector& s, ActionId a, RandomStream& rng) const {
  return pendulum_step(params_, s, a, rng);
}

StateVector PendulumModel::draw_rollout_state(RandomStream& rng) const {
  const double theta = rng.uniform(-kHalfPi, kHalfPi);
  const double theta_dot = rng.uniform(-params_.max_angular_velocity, params_.max_angular_velocity);
  return StateVector{theta, theta_dot};
}

StateVector PendulumModel::initial_eval_state(RandomStream& rng) const {
  const double w = params_.initial_perturbation;
  const double theta = rng.uniform(-w, w);
  const double theta_dot = rng.uniform(-w, w);
  return StateVector{theta, theta_dot};
}

MountainCarModel::MountainCarModel(MountainCarParams params) : params_(params) { params_.validate(); }

StateBox MountainCarModel::rollout_box() const {
  return {{params_.min_position, -params_.max_speed}, {params_.max_position, params_.max_speed}};
}

bool MountainCarModel::is_terminal(const StateVector& s) const { return s[0] >= params_.max_position; }

StepOutcome MountainCarModel::step(const StateVector& s, ActionId a, RandomStream& rng) const {
  return mountaincar_step(params_, s, a, rng);
}

StateVector MountainCarModel::draw_rollout_state(RandomStream& rng) const {
  // uniform() is strictly below 1, so the goal position itself is never drawn.
  const double x = rng.uniform(params_.min_position, params_.max_position);
  const double v = rng.uniform(-params_.max_speed, params_.max_speed);
  return StateVector{x, v};
}

StateVector MountainCarModel::initial_eval_state(RandomStream& /*rng*/) const {
  return StateVector{params_.start_position, params_.start_velocity};
}

}  // namespace rspi
