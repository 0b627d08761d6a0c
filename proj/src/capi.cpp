#include "rspi/rspi.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/harness.hpp"

struct rspi_config {
  rspi::Config config;
};

struct rspi_run {
  rspi::RunOutput output;
  std::size_t num_actions = 0;
};

struct rspi_policy {
  rspi::Policy policy;
};

namespace {

thread_local std::string g_last_error;

rspi_status fail(rspi_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Maps exceptions from the C++ core onto status codes.
template <typename F>
rspi_status guarded(F&& body) {
  try {
    return body();
  } catch (const rspi::InvalidInput& e) {
    return fail(RSPI_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const rspi::StateError& e) {
    return fail(RSPI_ERROR_STATE, e.what());
  } catch (const rspi::IoError& e) {
    return fail(RSPI_ERROR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RSPI_ERROR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(RSPI_ERROR_RUNTIME, e.what());
  } catch (...) {
    return fail(RSPI_ERROR_RUNTIME, "unknown error");
  }
}

#define RSPI_REQUIRE(ptr) \
  if ((ptr) == nullptr) return fail(RSPI_ERROR_INVALID_ARGUMENT, #ptr " must not be null")

}  // namespace

extern "C" {

const char* rspi_version(void) { return "1.0.0"; }

const char* rspi_last_error(void) { return g_last_error.c_str(); }

const char* rspi_status_name(rspi_status status) {
  switch (status) {
    case RSPI_OK: return "ok";
    case RSPI_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case RSPI_ERROR_STATE: return "invalid state";
    case RSPI_ERROR_IO: return "i/o error";
    case RSPI_ERROR_RUNTIME: return "runtime error";
  }
  return "unknown status";
}

rspi_status rspi_config_create(rspi_config** out) {
  RSPI_REQUIRE(out);
  return guarded([&] {
    *out = new rspi_config{};
    return RSPI_OK;
  });
}

void rspi_config_destroy(rspi_config* config) { delete config; }

rspi_status rspi_config_set(rspi_config* config, const char* key, const char* value) {
  RSPI_REQUIRE(config);
  RSPI_REQUIRE(key);
  RSPI_REQUIRE(value);
  return guarded([&] {
    config->config.set(key, value);
    return RSPI_OK;
  });
}

rspi_status rspi_config_load_file(rspi_config* config, const char* path) {
  RSPI_REQUIRE(config);
  RSPI_REQUIRE(path);
  return guarded([&] {
    config->config.load_file(path);
    return RSPI_OK;
  });
}

rspi_status rspi_config_get(const rspi_config* config, const char* key, char* buf, size_t buf_size, size_t* needed) {
  RSPI_REQUIRE(config);
  RSPI_REQUIRE(key);
  return guarded([&] {
    const std::string value = config->config.get(key);
    if (needed != nullptr) *needed = value.size() + 1;
    if (buf == nullptr || buf_size == 0) return RSPI_OK;
    if (buf_size < value.size() + 1) return fail(RSPI_ERROR_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(buf, value.c_str(), value.size() + 1);
    return RSPI_OK;
  });
}

rspi_status rspi_run_execute(const rspi_config* config, rspi_run** out) {
  RSPI_REQUIRE(config);
  RSPI_REQUIRE(out);
  return guarded([&] {
    rspi::RunOutput output = rspi::run_single(config->config);
    const std::size_t num_actions = output.result.best_policy.num_actions();
    auto run = std::make_unique<rspi_run>(rspi_run{std::move(output), num_actions});
    *out = run.release();
    return RSPI_OK;
  });
}

void rspi_run_destroy(rspi_run* run) { delete run; }

rspi_status rspi_run_get_summary(const rspi_run* run, rspi_run_summary* out) {
  RSPI_REQUIRE(run);
  RSPI_REQUIRE(out);
  const rspi::RunRecord& r = run->output.record;
  out->success = r.success ? 1 : 0;
  out->metric = r.metric;
  out->m_total = r.m_total;
  out->rollouts_total = r.rollouts_total;
  out->iterations = r.iterations;
  out->wall_ms = r.wall_ms;
  out->best_performance = run->output.result.best_performance;
  return RSPI_OK;
}

rspi_status rspi_run_append_record(const rspi_run* run, const char* records_path) {
  RSPI_REQUIRE(run);
  RSPI_REQUIRE(records_path);
  return guarded([&] {
    const std::filesystem::path path(records_path);
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream os(path, std::ios::binary | std::ios::app);
    if (!os) return fail(RSPI_ERROR_IO, "cannot open " + path.string());
    if (fresh) os << rspi::kRecordsHeader << '\n';
    os << rspi::format_record(run->output.record) << '\n';
    if (!os) return fail(RSPI_ERROR_IO, "failed writing " + path.string());
    return RSPI_OK;
  });
}

rspi_status rspi_run_write_iterations(const rspi_run* run, const char* path) {
  RSPI_REQUIRE(run);
  RSPI_REQUIRE(path);
  return guarded([&] {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) return fail(RSPI_ERROR_IO, std::string("cannot open ") + path);
    rspi::write_iterations_csv(os, run->output.result, run->num_actions);
    return os ? RSPI_OK : fail(RSPI_ERROR_IO, std::string("failed writing ") + path);
  });
}

rspi_status rspi_run_best_policy(const rspi_run* run, rspi_policy** out) {
  RSPI_REQUIRE(run);
  RSPI_REQUIRE(out);
  return guarded([&] {
    *out = new rspi_policy{run->output.result.best_policy};
    return RSPI_OK;
  });
}

rspi_status rspi_grid_execute(const rspi_config* config, const char* records_path, size_t parallelism,
                              size_t* out_count) {
  RSPI_REQUIRE(config);
  RSPI_REQUIRE(records_path);
  return guarded([&] {
    const rspi::ExperimentGrid grid = rspi::ExperimentGrid::from_config(config->config);
    const std::filesystem::path path(records_path);
    std::ofstream partial(path, std::ios::binary | std::ios::trunc);
    if (!partial) return fail(RSPI_ERROR_IO, "cannot open " + path.string());
    partial << rspi::kRecordsHeader << '\n' << std::flush;
    // Rows land in completion order while the grid runs; the final rewrite
    // puts them in (cell, seed) order.
    const auto records = rspi::run_grid(grid, parallelism, [&partial](const rspi::RunRecord& r) {
      partial << rspi::format_record(r) << '\n' << std::flush;
    });
    partial.close();
    rspi::write_records_file(path, records);
    if (out_count != nullptr) *out_count = records.size();
    return RSPI_OK;
  });
}

rspi_status rspi_policy_load(const char* path, rspi_policy** out) {
  RSPI_REQUIRE(path);
  RSPI_REQUIRE(out);
  return guarded([&] {
    std::ifstream is(path, std::ios::binary);
    if (!is) return fail(RSPI_ERROR_IO, std::string("cannot open ") + path);
    *out = new rspi_policy{rspi::Policy::load(is)};
    return RSPI_OK;
  });
}

rspi_status rspi_policy_save(const rspi_policy* policy, const char* path) {
  RSPI_REQUIRE(policy);
  RSPI_REQUIRE(path);
  return guarded([&] {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) return fail(RSPI_ERROR_IO, std::string("cannot open ") + path);
    policy->policy.save(os);
    return os ? RSPI_OK : fail(RSPI_ERROR_IO, std::string("failed writing ") + path);
  });
}

void rspi_policy_destroy(rspi_policy* policy) { delete policy; }

rspi_status rspi_policy_num_actions(const rspi_policy* policy, size_t* out) {
  RSPI_REQUIRE(policy);
  RSPI_REQUIRE(out);
  *out = policy->policy.num_actions();
  return RSPI_OK;
}

rspi_status rspi_policy_act(const rspi_policy* policy, const double* state, size_t state_dim, uint64_t seed,
                            size_t* out_action) {
  RSPI_REQUIRE(policy);
  RSPI_REQUIRE(state);
  RSPI_REQUIRE(out_action);
  return guarded([&] {
    rspi::RandomStream rng(seed);
    const rspi::StateVector s(std::vector<double>(state, state + state_dim));
    if (!s.is_finite()) return fail(RSPI_ERROR_INVALID_ARGUMENT, "state has non-finite components");
    *out_action = policy->policy.act(s, rng).index;
    return RSPI_OK;
  });
}

rspi_status rspi_policy_evaluate(const rspi_policy* policy, const rspi_config* config, uint64_t seed,
                                 int* out_success, int64_t* out_metric) {
  RSPI_REQUIRE(policy);
  RSPI_REQUIRE(config);
  RSPI_REQUIRE(out_success);
  RSPI_REQUIRE(out_metric);
  return guarded([&] {
    const auto model = rspi::make_domain(config->config.get("domain"), config->config);
    if (policy->policy.num_actions() != model->num_actions()) {
      return fail(RSPI_ERROR_INVALID_ARGUMENT, "policy action count does not match the domain");
    }
    if (const auto* params = policy->policy.params(); params && params->input_dim() != model->state_dim()) {
      return fail(RSPI_ERROR_INVALID_ARGUMENT, "policy input dimension does not match the domain");
    }
    const auto result =
        rspi::evaluate_success(*model, policy->policy, rspi::SuccessCriterion::for_model(*model),
                               rspi::RandomStream(seed).split("success"), config->config.get_uint("success_repeats"));
    *out_success = result.success ? 1 : 0;
    *out_metric = result.metric;
    return RSPI_OK;
  });
}

rspi_status rspi_curve_write(const char* records_path, const char* curve_path) {
  RSPI_REQUIRE(records_path);
  RSPI_REQUIRE(curve_path);
  return guarded([&] {
    const auto records = rspi::read_records_file(records_path);
    std::ofstream os(curve_path, std::ios::binary | std::ios::trunc);
    if (!os) return fail(RSPI_ERROR_IO, std::string("cannot open ") + curve_path);
    rspi::write_curve(os, rspi::success_curve(records));
    return os ? RSPI_OK : fail(RSPI_ERROR_IO, std::string("failed writing ") + curve_path);
  });
}

}  // extern "C"
