#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/engine.hpp"

namespace rspi {

/// How a single test episode is judged.
struct SuccessCriterion {
  enum class Kind {
    Survive,    // success iff no termination within `horizon` steps; metric = steps survived
    ReachGoal,  // success iff terminal within fewer than `threshold` steps; metric = steps to goal, capped
  };
  Kind kind = Kind::Survive;
  int horizon = 1000;
  int threshold = 0;

  static SuccessCriterion for_model(const GenerativeModel& model);
};

struct SuccessResult {
  bool success = false;
  int metric = 0;
};

/// One test episode per repeat from initial_eval_state(); repeat k uses
/// rng.split(k). Succeeds only if every repeat succeeds; metric is the worst one.
SuccessResult evaluate_success(const GenerativeModel& model, const Policy& policy, const SuccessCriterion& criterion,
                               const RandomStream& rng, std::size_t repeats = 1);

/// One row of the records CSV.
struct RunRecord {
  std::string method;
  std::string rule;
  std::string domain;
  std::uint64_t maxs = 0;
  std::uint64_t maxr = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  bool success = false;
  std::int64_t metric = 0;
  std::uint64_t m_total = 0;
  std::uint64_t rollouts_total = 0;
  std::uint64_t iterations = 0;
  std::int64_t wall_ms = 0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline constexpr const char* kRecordsHeader =
    "method,rule,domain,maxs,maxr,delta,seed,success,metric,m_total,rollouts_total,iterations,wall_ms";
inline constexpr const char* kCurveHeader = "x_samples,f_success";

std::string format_record(const RunRecord& r);
RunRecord parse_record(const std::string& line);
void write_records(std::ostream& os, const std::vector<RunRecord>& records);
/// Accepts an empty stream (no header) as zero records.
std::vector<RunRecord> read_records(std::istream& is);
std::vector<RunRecord> read_records_file(const std::filesystem::path& path);
void write_records_file(const std::filesystem::path& path, const std::vector<RunRecord>& records);

struct RunOutput {
  RunRecord record;
  PolicyIterationResult result;
};

/// One policy-iteration run configured by cfg, seeded by cfg's seed, followed
/// by success evaluation of the best policy.
RunOutput run_single(const Config& cfg);

void write_iterations_csv(std::ostream& os, const PolicyIterationResult& result, std::size_t num_actions);

struct GridCell {
  std::string method;
  std::string rule;  // "none" for rcpi
  std::uint64_t maxs = 0;
  std::uint64_t maxr = 0;
  double delta = 0.0;
};

struct ExperimentGrid {
  Config base;  // domain, master seed and every non-grid override
  std::vector<GridCell> cells;
  std::size_t seeds_per_cell = 1;

  static ExperimentGrid from_config(const Config& cfg);
  [[nodiscard]] std::uint64_t run_seed(std::size_t cell, std::size_t seed_index) const;
  [[nodiscard]] Config run_config(std::size_t cell, std::size_t seed_index) const;
};

/// Runs every (cell, seed) pair, up to `parallelism` at a time. `sink` is
/// called once per finished run, serialized, in completion order. Returns
/// records in (cell, seed) order. A run that throws yields an unsuccessful record.
std::vector<RunRecord> run_grid(const ExperimentGrid& grid, std::size_t parallelism,
                                const std::function<void(const RunRecord&)>& sink = {});

struct CurvePoint {
  std::uint64_t x = 0;
  std::uint64_t f = 0;
};

using SuccessCurve = std::vector<CurvePoint>;

/// f(x) = number of successful runs with m_total <= x, one point per distinct
/// successful m_total, ascending.
SuccessCurve success_curve(const std::vector<RunRecord>& records);
/// Evaluates the step function at an arbitrary x.
std::uint64_t curve_value(const SuccessCurve& curve, std::uint64_t x);
void write_curve(std::ostream& os, const SuccessCurve& curve);

std::string format_real(double v);

}  // namespace rspi
