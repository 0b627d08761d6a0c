#include "core/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "core/errors.hpp"

namespace rspi {

namespace {

template <typename T>
T parse_field(const std::string& text, const char* name) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(std::string("records: bad ") + name + " field '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

SuccessCriterion SuccessCriterion::for_model(const GenerativeModel& model) {
  if (model.name() == "mountain-car") return {Kind::ReachGoal, model.evaluation_horizon(), 75};
  return {Kind::Survive, model.evaluation_horizon(), 0};
}

SuccessResult evaluate_success(const GenerativeModel& model, const Policy& policy, const SuccessCriterion& criterion,
                               const RandomStream& rng, std::size_t repeats) {
  if (repeats < 1) throw InvalidInput("evaluate_success: repeats must be >= 1");
  SuccessResult overall{true, 0};
  for (std::size_t k = 0; k < repeats; ++k) {
    RandomStream stream = rng.split(static_cast<std::uint64_t>(k));
    StateVector s = model.initial_eval_state(stream);
    int steps = 0;
    bool terminated = false;
    while (steps < criterion.horizon) {
      StepOutcome out = model.step(s, policy.act(s, stream), stream);
      ++steps;
      if (out.terminal) {
        terminated = true;
        break;
      }
      s = std::move(out.next_state);
    }

    SuccessResult r;
    if (criterion.kind == SuccessCriterion::Kind::Survive) {
      r.metric = terminated ? steps - 1 : steps;
      r.success = !terminated;
    } else {
      r.metric = terminated ? steps : criterion.horizon;
      r.success = terminated && steps < criterion.threshold;
    }

    const bool worse = criterion.kind == SuccessCriterion::Kind::Survive ? r.metric < overall.metric
                                                                          : r.metric > overall.metric;
    if (k == 0 || worse) overall.metric = r.metric;
    overall.success = overall.success && r.success;
  }
  return overall;
}

std::string format_record(const RunRecord& r) {
  std::ostringstream os;
  os << r.method << ',' << r.rule << ',' << r.domain << ',' << r.maxs << ',' << r.maxr << ',' << format_real(r.delta)
     << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.metric << ',' << r.m_total << ',' << r.rollouts_total
     << ',' << r.iterations << ',' << r.wall_ms;
  return os.str();
}

RunRecord parse_record(const std::string& line) {
  const auto f = split_csv(line);
  if (f.size() != 13) throw IoError("records: expected 13 fields, got " + std::to_string(f.size()) + ": " + line);
  RunRecord r;
  r.method = f[0];
  r.rule = f[1];
  r.domain = f[2];
  r.maxs = parse_field<std::uint64_t>(f[3], "maxs");
  r.maxr = parse_field<std::uint64_t>(f[4], "maxr");
  r.delta = parse_field<double>(f[5], "delta");
  r.seed = parse_field<std::uint64_t>(f[6], "seed");
  const auto success = parse_field<int>(f[7], "success");
  if (success != 0 && success != 1) throw IoError("records: success must be 0 or 1");
  r.success = success == 1;
  r.metric = parse_field<std::int64_t>(f[8], "metric");
  r.m_total = parse_field<std::uint64_t>(f[9], "m_total");
  r.rollouts_total = parse_field<std::uint64_t>(f[10], "rollouts_total");
  r.iterations = parse_field<std::uint64_t>(f[11], "iterations");
  r.wall_ms = parse_field<std::int64_t>(f[12], "wall_ms");
  return r;
}

void write_records(std::ostream& os, const std::vector<RunRecord>& records) {
  os << kRecordsHeader << '\n';
  for (const auto& r : records) os << format_record(r) << '\n';
}

std::vector<RunRecord> read_records(std::istream& is) {
  std::vector<RunRecord> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  if (line != kRecordsHeader) throw IoError("records: missing or unexpected header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(parse_record(line));
  }
  return out;
}

std::vector<RunRecord> read_records_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open records file " + path.string());
  return read_records(in);
}

void write_records_file(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write records file " + path.string());
  write_records(out, records);
  if (!out) throw IoError("failed writing " + path.string());
}

RunOutput run_single(const Config& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::string domain = cfg.get("domain");
  const auto model = make_domain(domain, cfg);
  const IterationConfig it = iteration_config(cfg, *model);
  const std::uint64_t seed = cfg.get_uint("seed");
  const RandomStream root(seed);

  RunOutput out{{}, run_policy_iteration(*model, it, root.split("policy-iteration"))};
  const SuccessResult success = evaluate_success(*model, out.result.best_policy, SuccessCriterion::for_model(*model),
                                                 root.split("success"), cfg.get_uint("success_repeats"));

  RunRecord& r = out.record;
  r.method = std::string(method_name(it.method));
  r.rule = it.method == Method::Rspi ? std::string(it.collect.rule.name()) : "none";
  r.domain = domain;
  r.maxs = it.collect.max_states;
  r.maxr = it.collect.max_samples;
  r.delta = it.collect.delta;
  r.seed = seed;
  r.success = success.success;
  r.metric = success.metric;
  r.m_total = out.result.total_state_samples;
  r.rollouts_total = out.result.total_rollouts;
  r.iterations = out.result.iterations.size();
  if (cfg.get_bool("wall_time")) {
    r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

void write_iterations_csv(std::ostream& os, const PolicyIterationResult& result, std::size_t /*num_actions*/) {
  os << "iteration,accepted,state_samples,rollouts,rejections,old_performance,new_performance,improved,best,outcome\n";
  for (const auto& rec : result.iterations) {
    os << rec.iteration << ',' << rec.report.accepted << ',' << rec.report.state_samples << ','
       << rec.report.rollouts << ',' << rec.report.rejections << ',' << format_real(rec.old_performance) << ','
       << (std::isnan(rec.new_performance) ? std::string("nan") : format_real(rec.new_performance)) << ','
       << (rec.improved ? 1 : 0) << ',' << (rec.best ? 1 : 0) << ',' << outcome_name(rec.outcome) << '\n';
  }
}

ExperimentGrid ExperimentGrid::from_config(const Config& cfg) {
  ExperimentGrid grid;
  grid.base = cfg;
  grid.seeds_per_cell = cfg.get_uint("grid.seeds");
  if (grid.seeds_per_cell < 1) throw InvalidInput("grid.seeds must be >= 1");

  std::vector<std::uint64_t> maxs_values;
  std::vector<std::uint64_t> maxr_values;
  std::vector<double> delta_values;
  for (const auto& v : cfg.get_list("grid.maxs")) maxs_values.push_back(parse_field<std::uint64_t>(v, "grid.maxs"));
  for (const auto& v : cfg.get_list("grid.maxr")) maxr_values.push_back(parse_field<std::uint64_t>(v, "grid.maxr"));
  for (const auto& v : cfg.get_list("grid.delta")) delta_values.push_back(parse_field<double>(v, "grid.delta"));

  for (const auto& method : cfg.get_list("grid.methods")) {
    std::vector<std::string> rules{"none"};
    if (parse_method(method) == Method::Rspi) rules = cfg.get_list("grid.rules");
    for (const auto& rule : rules) {
      for (auto maxs : maxs_values) {
        for (auto maxr : maxr_values) {
          for (double delta : delta_values) {
            if (maxs < 1 || maxr < 1 || !(delta > 0 && delta < 1)) {
              throw InvalidInput("grid: maxs, maxr must be >= 1 and delta in (0, 1)");
            }
            grid.cells.push_back({method, rule, maxs, maxr, delta});
          }
        }
      }
    }
  }
  if (grid.cells.empty()) throw InvalidInput("grid: no cells");
  return grid;
}

std::uint64_t ExperimentGrid::run_seed(std::size_t cell, std::size_t seed_index) const {
  const RandomStream master(base.get_uint("seed"));
  return master.split("grid").split(static_cast<std::uint64_t>(cell)).split(static_cast<std::uint64_t>(seed_index)).key();
}

Config ExperimentGrid::run_config(std::size_t cell, std::size_t seed_index) const {
  const GridCell& c = cells.at(cell);
  Config cfg = base;
  cfg.set("method", c.method);
  if (c.rule != "none") cfg.set("rule", c.rule);
  cfg.set("maxs", std::to_string(c.maxs));
  cfg.set("maxr", std::to_string(c.maxr));
  cfg.set("delta", format_real(c.delta));
  cfg.set("seed", std::to_string(run_seed(cell, seed_index)));
  return cfg;
}

std::vector<RunRecord> run_grid(const ExperimentGrid& grid, std::size_t parallelism,
                                const std::function<void(const RunRecord&)>& sink) {
  const std::size_t total = grid.cells.size() * grid.seeds_per_cell;
  std::vector<RunRecord> records(total);
  std::atomic<std::size_t> next{0};
  std::mutex sink_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t cell = job / grid.seeds_per_cell;
      const std::size_t seed_index = job % grid.seeds_per_cell;
      const Config cfg = grid.run_config(cell, seed_index);
      RunRecord record;
      try {
        record = run_single(cfg).record;
      } catch (const std::exception&) {
        const GridCell& c = grid.cells[cell];
        record.method = c.method;
        record.rule = c.rule;
        record.domain = cfg.get("domain");
        record.maxs = c.maxs;
        record.maxr = c.maxr;
        record.delta = c.delta;
        record.seed = cfg.get_uint("seed");
        record.success = false;
      }
      records[job] = record;
      if (sink) {
        std::lock_guard lock(sink_mutex);
        sink(record);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(total, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return records;
}

SuccessCurve success_curve(const std::vector<RunRecord>& records) {
  std::map<std::uint64_t, std::uint64_t> counts;
  for (const auto& r : records) {
    if (r.success) ++counts[r.m_total];
  }
  SuccessCurve curve;
  std::uint64_t cumulative = 0;
  for (const auto& [x, n] : counts) {
    cumulative += n;
    curve.push_back({x, cumulative});
  }
  return curve;
}

std::uint64_t curve_value(const SuccessCurve& curve, std::uint64_t x) {
  std::uint64_t f = 0;
  for (const auto& p : curve) {
    if (p.x > x) break;
    f = p.f;
  }
  return f;
}

void write_curve(std::ostream& os, const SuccessCurve& curve) {
  os << kCurveHeader << '\n';
  for (const auto& p : curve) os << p.x << ',' << p.f << '\n';
}

}  // namespace rspi
