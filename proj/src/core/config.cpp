#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace rspi {

namespace {

enum class KeyType { String, Double, Int, UInt, Bool, List, Domain, Method, Rule };

struct KeySpec {
  const char* key;
  KeyType type;
  const char* default_value;
};

// clang-format off
constexpr KeySpec kKeys[] = {
    {"domain", KeyType::Domain, "pendulum"},
    {"method", KeyType::Method, "rspi"},
    {"rule", KeyType::Rule, "ucb1a"},
    {"maxs", KeyType::UInt, "100"},
    {"maxr", KeyType::UInt, "200"},
    {"delta", KeyType::Double, "0.1"},
    {"seed", KeyType::UInt, "1"},
    {"rejection", KeyType::Bool, ""},
    {"pool_size", KeyType::UInt, "0"},
    {"horizon", KeyType::UInt, "0"},
    {"gap_range", KeyType::Double, "0"},
    {"max_iterations", KeyType::UInt, "10"},
    {"eval_episodes", KeyType::UInt, "100"},
    {"eval_horizon", KeyType::UInt, "0"},
    {"perf_tolerance", KeyType::Double, "-1"},
    {"min_train_states", KeyType::UInt, "5"},
    {"rcpi_k", KeyType::UInt, "0"},
    {"learning_rate", KeyType::Double, "0.5"},
    {"epochs", KeyType::UInt, "25"},
    {"hidden_units", KeyType::UInt, "10"},
    {"init_scale", KeyType::Double, "0.1"},
    {"success_repeats", KeyType::UInt, "1"},
    {"wall_time", KeyType::Bool, "true"},
    {"grid.methods", KeyType::List, "rspi,rcpi"},
    {"grid.rules", KeyType::List, "count,ucb1a,ucb1b,succel"},
    {"grid.maxs", KeyType::List, "10,20,50,100,200"},
    {"grid.maxr", KeyType::List, "10,20,50,100,200"},
    {"grid.delta", KeyType::List, "0.1,0.01,0.001"},
    {"grid.seeds", KeyType::UInt, "5"},
    {"pendulum.gravity", KeyType::Double, "9.8"},
    {"pendulum.pole_mass", KeyType::Double, "2.0"},
    {"pendulum.cart_mass", KeyType::Double, "8.0"},
    {"pendulum.pole_length", KeyType::Double, "0.5"},
    {"pendulum.dt", KeyType::Double, "0.1"},
    {"pendulum.force", KeyType::Double, "50"},
    {"pendulum.noise", KeyType::Double, "10"},
    {"pendulum.gamma", KeyType::Double, "0.95"},
    {"pendulum.horizon", KeyType::UInt, "90"},
    {"pendulum.eval_horizon", KeyType::UInt, "1000"},
    {"pendulum.max_angular_velocity", KeyType::Double, "5"},
    {"pendulum.initial_perturbation", KeyType::Double, "0.05"},
    {"mountaincar.min_position", KeyType::Double, "-1.2"},
    {"mountaincar.max_position", KeyType::Double, "0.5"},
    {"mountaincar.max_speed", KeyType::Double, "0.07"},
    {"mountaincar.power", KeyType::Double, "0.001"},
    {"mountaincar.hill", KeyType::Double, "0.0025"},
    {"mountaincar.noise", KeyType::Double, "0.2"},
    {"mountaincar.gamma", KeyType::Double, "0.99"},
    {"mountaincar.gap_range", KeyType::Double, "1"},
    {"mountaincar.horizon", KeyType::UInt, "500"},
    {"mountaincar.eval_horizon", KeyType::UInt, "500"},
    {"mountaincar.start_position", KeyType::Double, "-0.5"},
    {"mountaincar.start_velocity", KeyType::Double, "0"},
};
// clang-format on

const KeySpec* find_key(std::string_view key) {
  for (const auto& spec : kKeys) {
    if (key == spec.key) return &spec;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return value;
}

void check_value(const KeySpec& spec, std::string_view value) {
  switch (spec.type) {
    case KeyType::String:
      break;
    case KeyType::Double:
      if (!std::isfinite(parse_number<double>(spec.key, value))) {
        throw InvalidInput(std::string("config key '") + spec.key + "': value must be finite");
      }
      break;
    case KeyType::Int:
      parse_number<std::int64_t>(spec.key, value);
      break;
    case KeyType::UInt:
      parse_number<std::uint64_t>(spec.key, value);
      break;
    case KeyType::Bool:
      parse_bool(value);
      break;
    case KeyType::List:
      if (split_list(value).empty()) throw InvalidInput(std::string("config key '") + spec.key + "': empty list");
      break;
    case KeyType::Domain:
      if (value != "pendulum" && value != "mountain-car") {
        throw InvalidInput("unknown domain '" + std::string(value) + "' (expected pendulum or mountain-car)");
      }
      break;
    case KeyType::Method:
      parse_method(value);
      break;
    case KeyType::Rule:
      SelectionRule::parse(value);
      break;
  }
}

}  // namespace

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw InvalidInput("expected a boolean, got '" + std::string(text) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void Config::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw InvalidInput("unknown config key '" + std::string(key) + "'");
  check_value(*spec, value);
  if (spec->type == KeyType::List) {
    // Type-check list members by the scalar key they stand for.
    const std::string_view name = key.substr(key.find('.') + 1);
    for (const auto& item : split_list(value)) {
      if (name == "methods") parse_method(item);
      else if (name == "rules") SelectionRule::parse(item);
      else if (name == "maxs" || name == "maxr") parse_number<std::uint64_t>(key, item);
      else if (name == "delta") parse_number<double>(key, item);
    }
  }
  values_.insert_or_assign(std::string(key), std::string(value));
}

void Config::parse_text(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidInput(std::string(origin) + ":" + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const InvalidInput& e) {
      throw InvalidInput(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  parse_text(buffer.str(), path.string());
}

bool Config::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::string Config::get(std::string_view key) const {
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw InvalidInput("unknown config key '" + std::string(key) + "'");
  return spec->default_value;
}

double Config::get_double(std::string_view key) const { return parse_number<double>(key, get(key)); }
std::int64_t Config::get_int(std::string_view key) const { return parse_number<std::int64_t>(key, get(key)); }
std::uint64_t Config::get_uint(std::string_view key) const { return parse_number<std::uint64_t>(key, get(key)); }
bool Config::get_bool(std::string_view key) const { return parse_bool(get(key)); }
std::vector<std::string> Config::get_list(std::string_view key) const { return split_list(get(key)); }

std::vector<std::string> Config::known_keys() {
  std::vector<std::string> keys;
  for (const auto& spec : kKeys) keys.emplace_back(spec.key);
  return keys;
}

PendulumParams pendulum_params(const Config& cfg) {
  PendulumParams p;
  p.gravity = cfg.get_double("pendulum.gravity");
  p.pole_mass = cfg.get_double("pendulum.pole_mass");
  p.cart_mass = cfg.get_double("pendulum.cart_mass");
  p.pole_length = cfg.get_double("pendulum.pole_length");
  p.dt = cfg.get_double("pendulum.dt");
  p.force = cfg.get_double("pendulum.force");
  p.noise_half_width = cfg.get_double("pendulum.noise");
  p.gamma = cfg.get_double("pendulum.gamma");
  p.horizon = static_cast<int>(cfg.get_uint("pendulum.horizon"));
  p.eval_horizon = static_cast<int>(cfg.get_uint("pendulum.eval_horizon"));
  p.max_angular_velocity = cfg.get_double("pendulum.max_angular_velocity");
  p.initial_perturbation = cfg.get_double("pendulum.initial_perturbation");
  return p;
}

MountainCarParams mountaincar_params(const Config& cfg) {
  MountainCarParams p;
  p.min_position = cfg.get_double("mountaincar.min_position");
  p.max_position = cfg.get_double("mountaincar.max_position");
  p.max_speed = cfg.get_double("mountaincar.max_speed");
  p.power = cfg.get_double("mountaincar.power");
  p.hill = cfg.get_double("mountaincar.hill");
  p.noise_half_width = cfg.get_double("mountaincar.noise");
  p.gamma = cfg.get_double("mountaincar.gamma");
  p.gap_range = cfg.get_double("mountaincar.gap_range");
  p.horizon = static_cast<int>(cfg.get_uint("mountaincar.horizon"));
  p.eval_horizon = static_cast<int>(cfg.get_uint("mountaincar.eval_horizon"));
  p.start_position = cfg.get_double("mountaincar.start_position");
  p.start_velocity = cfg.get_double("mountaincar.start_velocity");
  return p;
}

std::unique_ptr<GenerativeModel> make_domain(std::string_view name, const Config& cfg) {
  if (name == "pendulum") return std::make_unique<PendulumModel>(pendulum_params(cfg));
  if (name == "mountain-car") return std::make_unique<MountainCarModel>(mountaincar_params(cfg));
  throw InvalidInput("unknown domain '" + std::string(name) + "'");
}

IterationConfig iteration_config(const Config& cfg, const GenerativeModel& model) {
  IterationConfig it;
  it.method = parse_method(cfg.get("method"));
  CollectConfig& c = it.collect;
  c.max_states = cfg.get_uint("maxs");
  c.max_samples = cfg.get_uint("maxr");
  c.delta = cfg.get_double("delta");
  const double gap = cfg.get_double("gap_range");
  c.gap_range = gap > 0 ? gap : model.gap_range();
  c.pool_size = cfg.get_uint("pool_size");
  c.rule = SelectionRule::parse(cfg.get("rule"));
  c.rejection = cfg.has("rejection") && !cfg.get("rejection").empty()
                    ? cfg.get_bool("rejection")
                    : (c.rule.kind == RuleKind::Ucb1b || c.rule.kind == RuleKind::SuccEl);
  const auto horizon = cfg.get_uint("horizon");
  c.rollout.horizon = horizon > 0 ? static_cast<int>(horizon) : model.default_horizon();
  c.rollout.gamma = model.discount();

  it.rcpi_per_state = cfg.get_uint("rcpi_k");
  it.max_iterations = cfg.get_uint("max_iterations");
  it.eval_episodes = cfg.get_uint("eval_episodes");
  it.eval_horizon = static_cast<int>(cfg.get_uint("eval_horizon"));
  it.perf_tolerance = cfg.get_double("perf_tolerance");
  it.min_train_states = cfg.get_uint("min_train_states");

  it.train.learning_rate = cfg.get_double("learning_rate");
  it.train.epochs = static_cast<int>(cfg.get_uint("epochs"));
  it.train.hidden_units = cfg.get_uint("hidden_units");
  it.train.init_scale = cfg.get_double("init_scale");
  it.train.num_actions = model.num_actions();
  it.train.normalization = model.rollout_box();
  it.validate();
  return it;
}

}  // namespace rspi
