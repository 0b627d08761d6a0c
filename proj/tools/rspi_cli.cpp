// rspi command line: run, grid, eval and curve subcommands over the C API.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rspi/rspi.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct ConfigHandle {
  rspi_config* ptr = nullptr;
  ConfigHandle() {
    if (rspi_config_create(&ptr) != RSPI_OK) throw std::bad_alloc();
  }
  ~ConfigHandle() { rspi_config_destroy(ptr); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

struct CommonOptions {
  std::optional<std::string> domain, method, rule, maxs, maxr, delta, seed, config_file;
  std::optional<bool> rejection;
  std::vector<std::string> overrides;  // key=value
  std::string out_dir = ".";
  std::size_t parallel = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--domain", opt.domain, "pendulum or mountain-car");
  cmd->add_option("--method", opt.method, "rspi or rcpi");
  cmd->add_option("--rule", opt.rule, "count, ucb1a, ucb1b or succel");
  cmd->add_option("--maxs", opt.maxs, "accepted training states per iteration");
  cmd->add_option("--maxr", opt.maxr, "state-samples per iteration");
  cmd->add_option("--delta", opt.delta, "error probability of the acceptance test");
  cmd->add_option("--seed", opt.seed, "run seed (master seed for grid)");
  cmd->add_option("--config", opt.config_file, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_flag("--rejection,!--no-rejection", opt.rejection, "replace hopeless pool states");
  cmd->add_option("--set", opt.overrides, "extra key=value setting (repeatable)");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--parallel", opt.parallel, "concurrent runs (grid)")->check(CLI::PositiveNumber);
}

int report(rspi_status status, const char* what) {
  std::cerr << "rspi: " << what << ": " << rspi_last_error() << '\n';
  return status == RSPI_ERROR_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
}

// Config file first, then flags, so flags win.
std::optional<int> build_config(const CommonOptions& opt, ConfigHandle& cfg) {
  if (opt.config_file) {
    if (auto s = rspi_config_load_file(cfg.ptr, opt.config_file->c_str()); s != RSPI_OK) {
      return report(s == RSPI_ERROR_IO ? RSPI_ERROR_INVALID_ARGUMENT : s, "config file");
    }
  }
  std::vector<std::pair<std::string, std::string>> settings;
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "rspi: --set expects key=value, got '" << kv << "'\n";
      return kExitUsage;
    }
    settings.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const std::pair<const char*, const std::optional<std::string>*> flags[] = {
      {"domain", &opt.domain}, {"method", &opt.method}, {"rule", &opt.rule}, {"maxs", &opt.maxs},
      {"maxr", &opt.maxr},     {"delta", &opt.delta},   {"seed", &opt.seed}};
  for (const auto& [key, value] : flags) {
    if (*value) settings.emplace_back(key, **value);
  }
  if (opt.rejection) settings.emplace_back("rejection", *opt.rejection ? "true" : "false");

  for (const auto& [key, value] : settings) {
    if (auto s = rspi_config_set(cfg.ptr, key.c_str(), value.c_str()); s != RSPI_OK) return report(s, "config");
  }
  return std::nullopt;
}

std::optional<int> ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "rspi: cannot create output directory " << dir << ": " << ec.message() << '\n';
    return kExitRuntime;
  }
  return std::nullopt;
}

int cmd_run(const CommonOptions& opt) {
  ConfigHandle cfg;
  if (auto rc = build_config(opt, cfg)) return *rc;
  if (auto rc = ensure_dir(opt.out_dir)) return *rc;

  rspi_run* run = nullptr;
  if (auto s = rspi_run_execute(cfg.ptr, &run); s != RSPI_OK) return report(s, "run");
  const auto out = std::filesystem::path(opt.out_dir);
  int rc = 0;
  rspi_run_summary summary{};
  rspi_policy* policy = nullptr;
  if (auto s = rspi_run_append_record(run, (out / "records.csv").c_str()); s != RSPI_OK) {
    rc = report(s, "records");
  } else if (s = rspi_run_write_iterations(run, (out / "iterations.csv").c_str()); s != RSPI_OK) {
    rc = report(s, "iterations");
  } else if (s = rspi_run_best_policy(run, &policy); s != RSPI_OK) {
    rc = report(s, "policy");
  } else if (s = rspi_policy_save(policy, (out / "policy.txt").c_str()); s != RSPI_OK) {
    rc = report(s, "policy");
  } else {
    rspi_run_get_summary(run, &summary);
    std::printf("success=%d metric=%lld m_total=%llu rollouts=%llu iterations=%llu best_performance=%.6g\n",
                summary.success, static_cast<long long>(summary.metric),
                static_cast<unsigned long long>(summary.m_total), static_cast<unsigned long long>(summary.rollouts_total),
                static_cast<unsigned long long>(summary.iterations), summary.best_performance);
  }
  rspi_policy_destroy(policy);
  rspi_run_destroy(run);
  return rc;
}

int cmd_grid(const CommonOptions& opt) {
  ConfigHandle cfg;
  if (auto rc = build_config(opt, cfg)) return *rc;
  if (auto rc = ensure_dir(opt.out_dir)) return *rc;
  const auto records = std::filesystem::path(opt.out_dir) / "records.csv";
  std::size_t count = 0;
  if (auto s = rspi_grid_execute(cfg.ptr, records.c_str(), opt.parallel, &count); s != RSPI_OK) {
    return report(s, "grid");
  }
  std::printf("runs=%zu records=%s\n", count, records.c_str());
  return 0;
}

int cmd_eval(const CommonOptions& opt, const std::string& policy_path) {
  ConfigHandle cfg;
  if (auto rc = build_config(opt, cfg)) return *rc;
  char seed_buf[32];
  rspi_config_get(cfg.ptr, "seed", seed_buf, sizeof(seed_buf), nullptr);
  const auto seed = std::stoull(seed_buf);

  rspi_policy* policy = nullptr;
  if (auto s = rspi_policy_load(policy_path.c_str(), &policy); s != RSPI_OK) return report(s, "policy");
  int success = 0;
  int64_t metric = 0;
  const auto s = rspi_policy_evaluate(policy, cfg.ptr, seed, &success, &metric);
  rspi_policy_destroy(policy);
  if (s != RSPI_OK) return report(s, "eval");
  std::printf("success=%d metric=%lld\n", success, static_cast<long long>(metric));
  return 0;
}

int cmd_curve(const std::string& records, const std::string& out) {
  if (auto s = rspi_curve_write(records.c_str(), out.c_str()); s != RSPI_OK) return report(s, "curve");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rollout sampling policy iteration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rspi_version());

  CommonOptions run_opt, grid_opt, eval_opt;
  auto* run = app.add_subcommand("run", "single configuration; writes records.csv, iterations.csv, policy.txt");
  add_common(run, run_opt);

  auto* grid = app.add_subcommand("grid", "hyper-parameter sweep over the grid.* keys; writes records.csv");
  add_common(grid, grid_opt);

  std::string policy_path;
  auto* eval = app.add_subcommand("eval", "load a saved policy and run the success test");
  add_common(eval, eval_opt);
  eval->add_option("--policy", policy_path, "policy file written by run")->required();

  std::string records_path, curve_out;
  auto* curve = app.add_subcommand("curve", "records CSV to cumulative success curve CSV");
  curve->add_option("--records", records_path, "records CSV")->required();
  curve->add_option("--out", curve_out, "curve CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opt);
    if (*grid) return cmd_grid(grid_opt);
    if (*eval) return cmd_eval(eval_opt, policy_path);
    if (*curve) return cmd_curve(records_path, curve_out);
  } catch (const std::exception& e) {
    std::cerr << "rspi: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
