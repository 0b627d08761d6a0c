#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "core/domains.hpp"
#include "core/engine.hpp"

namespace rspi {

/// Flat key=value configuration. Keys are checked against a fixed table and
/// values are type-checked when set; later sets override earlier ones.
class Config {
 public:
  Config() = default;

  void set(std::string_view key, std::string_view value);
  void load_file(const std::filesystem::path& path);
  void parse_text(std::string_view text, std::string_view origin = "<text>");

  [[nodiscard]] bool has(std::string_view key) const;
  [[nodiscard]] std::string get(std::string_view key) const;  // value or the key's default

  [[nodiscard]] std::string get_string(std::string_view key) const { return get(key); }
  [[nodiscard]] double get_double(std::string_view key) const;
  [[nodiscard]] std::int64_t get_int(std::string_view key) const;
  [[nodiscard]] std::uint64_t get_uint(std::string_view key) const;
  [[nodiscard]] bool get_bool(std::string_view key) const;
  [[nodiscard]] std::vector<std::string> get_list(std::string_view key) const;

  [[nodiscard]] static std::vector<std::string> known_keys();
  [[nodiscard]] const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

bool parse_bool(std::string_view text);
std::vector<std::string> split_list(std::string_view text);

PendulumParams pendulum_params(const Config& cfg);
MountainCarParams mountaincar_params(const Config& cfg);

/// Builds the named domain with any overrides from cfg.
std::unique_ptr<GenerativeModel> make_domain(std::string_view name, const Config& cfg);

/// Engine configuration for one run. `rejection` defaults to on for ucb1b and
/// succel and off otherwise unless the key is set.
IterationConfig iteration_config(const Config& cfg, const GenerativeModel& model);

}  // namespace rspi
