#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "core/classifier.hpp"
#include "core/domains.hpp"
#include "core/errors.hpp"
#include "core/mdp.hpp"
#include "support/synthetic_models.hpp"

using namespace rspi;
using rspi::testing::CountingModel;
using rspi::testing::TabularModel;

TEST(DiscountedReturn, Examples) {
  EXPECT_EQ(discounted_return({}, 0.95), 0.0);
  const std::vector<double> ones{-1, -1, -1};
  EXPECT_DOUBLE_EQ(discounted_return(ones, 1.0), -3.0);
  const std::vector<double> late{0, 0, -1};
  EXPECT_NEAR(discounted_return(late, 0.95), -0.9025, 1e-15);
}

TEST(DiscountedReturn, RejectsNonFinite) {
  const std::vector<double> bad{0.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(discounted_return(bad, 0.9), InvalidInput);
  const std::vector<double> inf{std::numeric_limits<double>::infinity()};
  EXPECT_THROW(discounted_return(inf, 0.9), InvalidInput);
  EXPECT_THROW(discounted_return({}, 0.0), InvalidInput);
}

TEST(Rollout, GeometricSumOnConstantRewardChain) {
  const auto model = TabularModel::constant_reward(1.0, 0.5);
  RandomStream rng(1);
  const double ret = rollout(model, StateVector{0.0}, ActionId{0}, Policy::uniform(2), {3, 0.5}, rng);
  EXPECT_DOUBLE_EQ(ret, 1.75);
}

TEST(Rollout, PendulumFallingStateReturnsPenalty) {
  const PendulumModel model;
  for (std::size_t a = 0; a < 3; ++a) {
    RandomStream rng(a);
    EXPECT_EQ(rollout(model, StateVector{1.5, 5.0}, ActionId{a}, Policy::uniform(3), {90, 0.95}, rng), -1.0);
  }
}

TEST(Rollout, SameSeedSameReturn) {
  const PendulumModel model;
  const StateVector s{0.3, -0.5};
  RandomStream a(99), b(99);
  EXPECT_EQ(rollout(model, s, ActionId{1}, Policy::uniform(3), {90, 0.95}, a),
            rollout(model, s, ActionId{1}, Policy::uniform(3), {90, 0.95}, b));
}

TEST(Rollout, DeterministicModelAndPolicyGiveIdenticalRollouts) {
  const auto model = TabularModel::chain(5, 0.9);
  const Policy policy = rspi::testing::threshold_policy(2, 0, 4, 2.5, 1, 0);
  RandomStream a(1), b(2);
  EXPECT_EQ(rollout(model, StateVector{2.0}, ActionId{0}, policy, {7, 0.9}, a),
            rollout(model, StateVector{2.0}, ActionId{0}, policy, {7, 0.9}, b));
}

TEST(Rollout, ValidatesInputs) {
  const PendulumModel model;
  RandomStream rng(1);
  EXPECT_THROW(rollout(model, StateVector{0.0}, ActionId{0}, Policy::uniform(3), {5, 0.9}, rng), InvalidInput);
  EXPECT_THROW(rollout(model, StateVector{0.0, 0.0}, ActionId{3}, Policy::uniform(3), {5, 0.9}, rng), InvalidInput);
  EXPECT_THROW(rollout(model, StateVector{0.0, 0.0}, ActionId{0}, Policy::uniform(3), {0, 0.9}, rng), InvalidInput);
  EXPECT_THROW(rollout(model, StateVector{0.0, 0.0}, ActionId{0}, Policy::uniform(3), {5, 1.5}, rng), InvalidInput);
}

TEST(SampleState, OneStepRewardsPerAction) {
  const auto model = TabularModel::one_step(3);
  const auto q = sample_state(model, StateVector{0.0}, Policy::uniform(3), {10, 0.9}, RandomStream(3));
  EXPECT_EQ(q, (QSampleVector{0.0, 1.0, 2.0}));
}

TEST(SampleState, MatchesFiniteHorizonDpOnChain) {
  const auto model = TabularModel::chain(5, 0.9);
  // Left below 2.5, right above.
  const Policy policy = rspi::testing::threshold_policy(2, 0, 4, 2.5, 0, 1);
  const std::vector<std::size_t> table{0, 0, 0, 1, 1};
  for (int horizon : {1, 2, 5, 12}) {
    const auto q_dp = rspi::testing::finite_horizon_q(model, table, horizon, 0.9);
    for (std::size_t s = 0; s < 5; ++s) {
      const auto q = sample_state(model, StateVector{static_cast<double>(s)}, policy, {horizon, 0.9}, RandomStream(s));
      for (std::size_t a = 0; a < 2; ++a) EXPECT_NEAR(q[a], q_dp[s][a], 1e-12) << "s=" << s << " T=" << horizon;
    }
  }
}

TEST(SampleState, LengthEqualsActionCount) {
  const PendulumModel pendulum;
  const MountainCarModel car;
  EXPECT_EQ(sample_state(pendulum, StateVector{0.0, 0.0}, Policy::uniform(3), {20, 0.95}, RandomStream(1)).size(), 3u);
  EXPECT_EQ(sample_state(car, StateVector{-0.5, 0.0}, Policy::uniform(3), {20, 0.99}, RandomStream(1)).size(), 3u);
}

TEST(SampleState, SimulatesExactlyTheTrajectorySteps) {
  const auto chain = TabularModel::chain(5, 0.9);
  CountingModel counted(chain);
  sample_state(counted, StateVector{1.0}, Policy::uniform(2), {8, 0.9}, RandomStream(1));
  EXPECT_EQ(counted.steps.load(), 2u * 8u);

  const auto one_step = TabularModel::one_step(4);
  CountingModel counted_one(one_step);
  sample_state(counted_one, StateVector{0.0}, Policy::uniform(4), {50, 0.9}, RandomStream(1));
  EXPECT_EQ(counted_one.steps.load(), 4u);
}

TEST(SampleState, RejectsTerminalState) {
  const auto model = TabularModel::one_step(2);
  EXPECT_THROW(sample_state(model, StateVector{1.0}, Policy::uniform(2), {3, 1.0}, RandomStream(1)), InvalidInput);
  const PendulumModel pendulum;
  EXPECT_THROW(sample_state(pendulum, StateVector{2.0, 0.0}, Policy::uniform(3), {3, 0.9}, RandomStream(1)),
               InvalidInput);
}

TEST(SampleState, NoisyChainMeanWithinThreeStandardErrors) {
  const auto model = TabularModel::chain(5, 0.9, 0.5);
  const Policy policy = rspi::testing::threshold_policy(2, 0, 4, 2.5, 0, 1);
  const auto q_dp = rspi::testing::finite_horizon_q(model, {0, 0, 0, 1, 1}, 6, 0.9);
  const int n = 100000;
  double sum = 0, sum_sq = 0;
  const RandomStream root(17);
  for (int i = 0; i < n; ++i) {
    RandomStream r = root.split(static_cast<std::uint64_t>(i));
    const double v = rollout(model, StateVector{2.0}, ActionId{1}, policy, {6, 0.9}, r);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - q_dp[2][1]), 3 * se);
}

namespace {

// Independent pendulum simulator: separate dynamics code and generator.
double oracle_pendulum_rollout(double theta, double theta_dot, int first_action, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> noise(-10.0, 10.0);
  std::uniform_int_distribution<int> pick(0, 2);
  const double forces[3] = {-50.0, 0.0, 50.0};
  double total = 0.0, weight = 1.0;
  int action = first_action;
  for (int t = 0; t < 90; ++t) {
    const double u = forces[action] + noise(gen);
    const double a = 1.0 / 10.0;
    const double acc = (9.8 * std::sin(theta) - a * 2.0 * 0.5 * theta_dot * theta_dot * std::sin(2 * theta) / 2 -
                        a * std::cos(theta) * u) /
                       (4.0 * 0.5 / 3.0 - a * 2.0 * 0.5 * std::cos(theta) * std::cos(theta));
    theta_dot += 0.1 * acc;
    theta += 0.1 * theta_dot;
    if (std::abs(theta) > std::numbers::pi / 2) {
      total += weight * -1.0;
      break;
    }
    weight *= 0.95;
    action = pick(gen);
  }
  return total;
}

}  // namespace

TEST(Rollout, NoisyPendulumAgreesWithIndependentMonteCarlo) {
  const PendulumModel model;
  const StateVector s{0.2, 0.4};
  const int n = 100000;
  double sum = 0, sum_sq = 0;
  const RandomStream root(5);
  for (int i = 0; i < n; ++i) {
    RandomStream r = root.split(static_cast<std::uint64_t>(i));
    const double v = rollout(model, s, ActionId{2}, Policy::uniform(3), {90, 0.95}, r);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;

  std::mt19937_64 gen(20240607);
  const int n_oracle = 400000;
  double o_sum = 0, o_sum_sq = 0;
  for (int i = 0; i < n_oracle; ++i) {
    const double v = oracle_pendulum_rollout(0.2, 0.4, 2, gen);
    o_sum += v;
    o_sum_sq += v * v;
  }
  const double o_mean = o_sum / n_oracle;
  const double o_var = o_sum_sq / n_oracle - o_mean * o_mean;
  const double se = std::sqrt(var / n + o_var / n_oracle);
  EXPECT_LE(std::abs(mean - o_mean), 3 * se) << mean << " vs " << o_mean;
}
