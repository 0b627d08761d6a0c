#include "core/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "core/errors.hpp"

namespace rspi {

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) throw IoError("policy file: bad number '" + token + "'");
  return v;
}

std::string expect_line(std::istream& is, const std::string& keyword) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("policy file: missing '" + keyword + "' line");
  if (line.rfind(keyword, 0) != 0) throw IoError("policy file: expected '" + keyword + "', got '" + line + "'");
  return line.substr(keyword.size());
}

std::vector<double> parse_numbers(const std::string& text) {
  std::istringstream ss(text);
  std::vector<double> out;
  std::string token;
  while (ss >> token) out.push_back(parse_double(token));
  return out;
}

}  // namespace

MlpParams MlpParams::zeros(std::size_t input_dim, std::size_t hidden_units, std::size_t output_dim,
                           const StateBox& box) {
  if (input_dim == 0 || hidden_units == 0 || output_dim == 0) throw InvalidInput("mlp: dimensions must be positive");
  if (box.lower.size() != input_dim || box.upper.size() != input_dim) {
    throw InvalidInput("mlp: normalization box does not match input dimension");
  }
  const auto in = static_cast<Eigen::Index>(input_dim);
  const auto hid = static_cast<Eigen::Index>(hidden_units);
  const auto out = static_cast<Eigen::Index>(output_dim);
  MlpParams p;
  p.w1 = Eigen::MatrixXd::Zero(hid, in);
  p.b1 = Eigen::VectorXd::Zero(hid);
  p.w2 = Eigen::MatrixXd::Zero(out, hid);
  p.b2 = Eigen::VectorXd::Zero(out);
  p.norm_lower = to_vector(box.lower);
  p.norm_upper = to_vector(box.upper);
  p.validate();
  return p;
}

std::size_t MlpParams::weight_count() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
}

std::vector<double> MlpParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(weight_count());
  for (Eigen::Index r = 0; r < w1.rows(); ++r)
    for (Eigen::Index c = 0; c < w1.cols(); ++c) flat.push_back(w1(r, c));
  flat.insert(flat.end(), b1.data(), b1.data() + b1.size());
  for (Eigen::Index r = 0; r < w2.rows(); ++r)
    for (Eigen::Index c = 0; c < w2.cols(); ++c) flat.push_back(w2(r, c));
  flat.insert(flat.end(), b2.data(), b2.data() + b2.size());
  return flat;
}

void MlpParams::assign(std::span<const double> flat) {
  if (flat.size() != weight_count()) throw InvalidInput("mlp: flat weight vector has the wrong length");
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < w1.rows(); ++r)
    for (Eigen::Index c = 0; c < w1.cols(); ++c) w1(r, c) = flat[i++];
  for (Eigen::Index k = 0; k < b1.size(); ++k) b1(k) = flat[i++];
  for (Eigen::Index r = 0; r < w2.rows(); ++r)
    for (Eigen::Index c = 0; c < w2.cols(); ++c) w2(r, c) = flat[i++];
  for (Eigen::Index k = 0; k < b2.size(); ++k) b2(k) = flat[i++];
}

Eigen::VectorXd MlpParams::normalize(const StateVector& s) const {
  if (s.size() != input_dim()) {
    throw InvalidInput("mlp: state dimension " + std::to_string(s.size()) + " does not match input dimension " +
                       std::to_string(input_dim()));
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(s.size()));
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    x(k) = 2.0 * (s[i] - norm_lower(k)) / (norm_upper(k) - norm_lower(k)) - 1.0;
  }
  return x;
}

void MlpParams::validate() const {
  if (b1.size() != w1.rows() || w2.cols() != w1.rows() || b2.size() != w2.rows()) {
    throw InvalidInput("mlp: inconsistent layer shapes");
  }
  if (norm_lower.size() != w1.cols() || norm_upper.size() != w1.cols()) {
    throw InvalidInput("mlp: normalization constants do not match input dimension");
  }
  if (!((norm_upper - norm_lower).array() > 0.0).all()) throw InvalidInput("mlp: empty normalization interval");
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite()) {
    throw InvalidInput("mlp: non-finite weights");
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidInput("train: learning rate must be positive");
  if (epochs < 1) throw InvalidInput("train: epochs must be >= 1");
  if (hidden_units == 0) throw InvalidInput("train: hidden units must be positive");
  if (num_actions < 1) throw InvalidInput("train: number of actions must be positive");
  if (!(init_scale >= 0.0)) throw InvalidInput("train: init scale must be non-negative");
}

Eigen::VectorXd forward(const MlpParams& params, const StateVector& s) {
  const Eigen::VectorXd x = params.normalize(s);
  const Eigen::VectorXd hidden = (params.w1 * x + params.b1).array().tanh();
  return softmax(params.w2 * hidden + params.b2);
}

double loss_and_gradient(const MlpParams& params, const StateVector& s, ActionId target,
                         std::vector<double>* gradient) {
  if (target.index >= params.output_dim()) throw InvalidInput("mlp: target action out of range");
  const Eigen::VectorXd x = params.normalize(s);
  const Eigen::VectorXd hidden = (params.w1 * x + params.b1).array().tanh();
  const Eigen::VectorXd probs = softmax(params.w2 * hidden + params.b2);
  const auto t = static_cast<Eigen::Index>(target.index);
  const double loss = -std::log(probs(t));

  if (gradient != nullptr) {
    Eigen::VectorXd d_out = probs;
    d_out(t) -= 1.0;
    const Eigen::VectorXd d_hidden =
        ((params.w2.transpose() * d_out).array() * (1.0 - hidden.array().square())).matrix();

    MlpParams g = params;
    g.w1 = d_hidden * x.transpose();
    g.b1 = d_hidden;
    g.w2 = d_out * hidden.transpose();
    g.b2 = d_out;
    *gradient = g.flatten();
  }
  return loss;
}

double training_loss(const MlpParams& params, const TrainingSet& examples) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& ex : examples) {
    if (ex.polarity != Polarity::Positive) continue;
    total += loss_and_gradient(params, ex.state, ex.action, nullptr);
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

MlpParams train(const TrainingSet& examples, const TrainConfig& cfg, RandomStream& rng) {
  cfg.validate();
  std::vector<const TrainingExample*> positives;
  for (const auto& ex : examples) {
    if (ex.polarity == Polarity::Positive) positives.push_back(&ex);
  }
  if (positives.empty()) throw InvalidInput("train: training set has no positive examples");

  const std::size_t input_dim = positives.front()->state.size();
  MlpParams params = MlpParams::zeros(input_dim, cfg.hidden_units, cfg.num_actions, cfg.normalization);
  std::vector<double> flat = params.flatten();
  for (double& w : flat) w = rng.uniform(-cfg.init_scale, cfg.init_scale);
  params.assign(flat);

  std::vector<double> grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(positives.begin(), positives.end(), rng);
    for (const TrainingExample* ex : positives) {
      loss_and_gradient(params, ex->state, ex->action, &grad);
      flat = params.flatten();
      for (std::size_t i = 0; i < flat.size(); ++i) flat[i] -= cfg.learning_rate * grad[i];
      params.assign(flat);
    }
  }
  params.validate();
  return params;
}

Policy Policy::uniform(std::size_t num_actions) {
  if (num_actions == 0) throw InvalidInput("policy: number of actions must be positive");
  return Policy(num_actions, nullptr);
}

Policy Policy::classifier(MlpParams params) {
  params.validate();
  const std::size_t n = params.output_dim();
  return Policy(n, std::make_shared<const MlpParams>(std::move(params)));
}

ActionId Policy::act(const StateVector& s, RandomStream& rng) const {
  if (params_ == nullptr) return ActionId{rng.uniform_index(num_actions_)};
  const Eigen::VectorXd scores = forward(*params_, s);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k) {
    if (scores(k) > scores(best)) best = k;
  }
  return ActionId{static_cast<std::size_t>(best)};
}

void Policy::save(std::ostream& os) const {
  os << "rspi-policy 1\n";
  os << "actions " << num_actions_ << "\n";
  if (params_ == nullptr) {
    os << "variant uniform\n";
    return;
  }
  const MlpParams& p = *params_;
  os << "variant classifier\n";
  os << "dims " << p.input_dim() << ' ' << p.hidden_units() << ' ' << p.output_dim() << "\n";
  auto write_row = [&os](const char* key, std::span<const double> values) {
    os << key;
    for (double v : values) os << ' ' << format_double(v);
    os << "\n";
  };
  write_row("norm_lower", {p.norm_lower.data(), static_cast<std::size_t>(p.norm_lower.size())});
  write_row("norm_upper", {p.norm_upper.data(), static_cast<std::size_t>(p.norm_upper.size())});
  write_row("weights", p.flatten());
}

Policy Policy::load(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header != "rspi-policy 1") throw IoError("policy file: bad header");
  const auto actions = parse_numbers(expect_line(is, "actions"));
  if (actions.size() != 1 || actions[0] < 1) throw IoError("policy file: bad action count");
  const auto num_actions = static_cast<std::size_t>(actions[0]);
  const std::string variant = expect_line(is, "variant ");
  if (variant == "uniform") return Policy::uniform(num_actions);
  if (variant != "classifier") throw IoError("policy file: unknown variant '" + variant + "'");

  const auto dims = parse_numbers(expect_line(is, "dims"));
  if (dims.size() != 3) throw IoError("policy file: bad dims line");
  const auto lower = parse_numbers(expect_line(is, "norm_lower"));
  const auto upper = parse_numbers(expect_line(is, "norm_upper"));
  const auto weights = parse_numbers(expect_line(is, "weights"));
  try {
    MlpParams p = MlpParams::zeros(static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                                   static_cast<std::size_t>(dims[2]), StateBox{lower, upper});
    p.assign(weights);
    if (p.output_dim() != num_actions) throw IoError("policy file: action count does not match output layer");
    return Policy::classifier(std::move(p));
  } catch (const InvalidInput& e) {
    throw IoError(std::string("policy file: ") + e.what());
  }
}

}  // namespace rspi
