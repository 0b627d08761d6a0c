#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core/mdp.hpp"

namespace rspi {

enum class Polarity { Positive, Negative };

struct TrainingExample {
  StateVector state;
  ActionId action;
  Polarity polarity = Polarity::Positive;
};

using TrainingSet = std::vector<TrainingExample>;

/// Two-layer perceptron: tanh hidden layer, softmax output. Inputs are mapped
/// affinely to [-1, 1] per component using the stored normalization box, so
/// training and prediction always see the same scaling.
struct MlpParams {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // output x hidden
  Eigen::VectorXd b2;
  Eigen::VectorXd norm_lower;
  Eigen::VectorXd norm_upper;

  static MlpParams zeros(std::size_t input_dim, std::size_t hidden_units, std::size_t output_dim, const StateBox& box);

  [[nodiscard]] std::size_t input_dim() const { return static_cast<std::size_t>(w1.cols()); }
  [[nodiscard]] std::size_t hidden_units() const { return static_cast<std::size_t>(w1.rows()); }
  [[nodiscard]] std::size_t output_dim() const { return static_cast<std::size_t>(w2.rows()); }
  [[nodiscard]] std::size_t weight_count() const;

  // Weights in the order w1 (row-major), b1, w2 (row-major), b2.
  [[nodiscard]] std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  [[nodiscard]] Eigen::VectorXd normalize(const StateVector& s) const;
  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 25;  // full shuffled passes over the positive examples
  std::size_t hidden_units = 10;
  double init_scale = 0.1;  // initial weights uniform in [-init_scale, init_scale]
  std::size_t num_actions = 0;  // 0: taken from the model by the engine
  StateBox normalization;

  void validate() const;
};

/// Class probabilities for state s.
Eigen::VectorXd forward(const MlpParams& params, const StateVector& s);

/// Cross-entropy loss -log p(target | s). If gradient is non-null it receives
/// d loss / d weights in MlpParams::flatten() order.
double loss_and_gradient(const MlpParams& params, const StateVector& s, ActionId target,
                         std::vector<double>* gradient);

/// Mean cross-entropy over the positive examples.
double training_loss(const MlpParams& params, const TrainingSet& examples);

/// Per-example SGD on the positive examples; negatives are implied by the
/// softmax normalization. Throws InvalidInput if there is no positive example.
MlpParams train(const TrainingSet& examples, const TrainConfig& cfg, RandomStream& rng);

/// Either the uniform-random policy or a trained classifier. Trained
/// parameters are immutable and shared, so copies are cheap and thread safe.
class Policy {
 public:
  static Policy uniform(std::size_t num_actions);
  static Policy classifier(MlpParams params);

  [[nodiscard]] bool is_uniform() const noexcept { return params_ == nullptr; }
  [[nodiscard]] std::size_t num_actions() const noexcept { return num_actions_; }
  [[nodiscard]] const MlpParams* params() const noexcept { return params_.get(); }

  // Uniform variant draws from rng; classifier variant is argmax of forward()
  // with ties to the lowest index and leaves rng untouched.
  ActionId act(const StateVector& s, RandomStream& rng) const;

  void save(std::ostream& os) const;
  static Policy load(std::istream& is);

 private:
  Policy(std::size_t num_actions, std::shared_ptr<const MlpParams> params)
      : num_actions_(num_actions), params_(std::move(params)) {}

  std::size_t num_actions_;
  std::shared_ptr<const MlpParams> params_;
};

inline ActionId predict(const Policy& policy, const StateVector& s, RandomStream& rng) { return policy.act(s, rng); }

}  // namespace rspi
