#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "resv/error.hpp"
#include "resv/experiment.hpp"
#include "resv/oracle.hpp"
#include "resv/policies.hpp"
#include "resv/pricing.hpp"
#include "resv/report_json.hpp"
#include "resv/traces.hpp"

namespace resv {

inline DemandTrace load_trace(const TraceSource& source) {
  if (const auto* path = std::get_if<std::filesystem::path>(&source)) return load_trace(*path);
  return generate_synthetic(std::get<SyntheticSpec>(source));
}

namespace detail {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

inline std::optional<OracleResult> run_oracle(const DemandTrace& trace, const PricingModel& pricing,
                                              OracleMethod method) {
  switch (method) {
    case OracleMethod::kNone: return std::nullopt;
    case OracleMethod::kDp: {
      const auto s = solve_dp(trace, pricing);
      return OracleResult{method, s.cost, s.schedule.num_reservations()};
    }
    case OracleMethod::kBrute: {
      const auto s = solve_brute_force(trace, pricing);
      return OracleResult{method, s.cost, s.schedule.num_reservations()};
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Runs every configured policy on an already loaded trace. Costs are
// normalized to All-on-demand; a zero-demand trace normalizes to 1.
inline Report evaluate_trace(const ExperimentConfig& config, const DemandTrace& trace) {
  Report report;
  report.config = config;
  report.length = trace.length();
  report.total_demand = trace.total();
  report.stats = classify(trace);
  report.break_even = break_even(config.pricing);
  report.degenerate = trace.total() == 0;

  try {
    report.oracle = detail::run_oracle(trace, config.pricing, config.oracle);
  } catch (const Intractable& e) {
    report.warnings.push_back(std::string("oracle skipped: ") + e.what());
  }

  const double baseline = all_on_demand_cost(trace, config.pricing);
  auto normalize = [&](double cost) { return report.degenerate ? 1.0 : cost / baseline; };
  auto ratio = [&](double cost) -> std::optional<double> {
    if (!report.oracle) return std::nullopt;
    return competitive_ratio(cost, report.oracle->cost);
  };

  for (const auto& spec : config.policies) {
    PolicyResult result;
    result.label = spec.label();
    result.spec = spec;
    const auto schedule = run_policy(spec.kind, spec.config, trace, config.pricing);
    result.sampled_threshold = schedule.threshold;
    result.cost = evaluate_cost(trace, schedule, config.pricing);
    result.cost.normalized_to_on_demand = normalize(result.cost.total);
    result.competitive_ratio = ratio(result.cost.total);
    if (spec.kind == PolicyKind::kRandomized) {
      const auto window = spec.config.window > 0 ? std::optional<std::int64_t>(spec.config.window) : std::nullopt;
      result.expected_cost = expected_cost_exact(trace, config.pricing, window);
      result.expected_normalized = normalize(*result.expected_cost);
      result.expected_competitive_ratio = ratio(*result.expected_cost);
    }
    for (const auto& other : report.results) {
      if (other.label == result.label) throw ConfigError("duplicate policy " + result.label);
    }
    report.results.push_back(std::move(result));
  }
  return report;
}

inline void write_report(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report to " + path.string());
  out << report_to_json(report).dump(2) << '\n';
}

// Loads the trace, evaluates it, stamps the report and writes it when an
// output path is configured.
inline Report run_experiment(const ExperimentConfig& config) {
  if (config.policies.empty()) throw ConfigError("no policies selected");
  for (const auto& spec : config.policies) validate(spec.config, config.pricing);
  Report report = evaluate_trace(config, load_trace(config.trace));
  report.generated_at = detail::utc_timestamp();
  if (config.out) write_report(report, *config.out);
  return report;
}

struct GroupSummaryRow {
  std::string group;  // "all" or a fluctuation group
  std::string policy;
  std::size_t count = 0;
  double mean_normalized = 0.0;
  std::optional<double> mean_expected_normalized;
};

// Per-group arithmetic means of normalized cost for each policy label, plus
// an "all" group over every report. Rows follow group then first-seen policy order.
inline std::vector<GroupSummaryRow> summarize_groups(const std::vector<Report>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports to summarize");
  struct Acc {
    std::size_t n = 0, n_expected = 0;
    double sum = 0.0, sum_expected = 0.0;
  };
  std::vector<std::string> policies;
  std::map<std::pair<std::string, std::string>, Acc> acc;
  for (const auto& report : reports) {
    for (const auto& r : report.results) {
      if (std::find(policies.begin(), policies.end(), r.label) == policies.end()) policies.push_back(r.label);
      for (const auto& group : {std::string("all"), std::string(to_string(report.stats.group))}) {
        auto& a = acc[{group, r.label}];
        ++a.n;
        a.sum += r.cost.normalized_to_on_demand.value_or(1.0);
        if (r.expected_normalized) {
          ++a.n_expected;
          a.sum_expected += *r.expected_normalized;
        }
      }
    }
  }
  std::vector<GroupSummaryRow> rows;
  for (const char* group : {"all", "high", "medium", "stable"}) {
    for (const auto& policy : policies) {
      const auto it = acc.find({group, policy});
      if (it == acc.end()) continue;
      const auto& a = it->second;
      GroupSummaryRow row{group, policy, a.n, a.sum / static_cast<double>(a.n), std::nullopt};
      if (a.n_expected > 0) row.mean_expected_normalized = a.sum_expected / static_cast<double>(a.n_expected);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

inline std::string summary_csv(const std::vector<GroupSummaryRow>& rows) {
  std::ostringstream out;
  out << "group,policy,count,mean_normalized_cost,mean_expected_normalized_cost\n";
  for (const auto& r : rows) {
    out << r.group << ',' << r.policy << ',' << r.count << ',' << format_number(r.mean_normalized) << ',';
    if (r.mean_expected_normalized) out << format_number(*r.mean_expected_normalized);
    out << '\n';
  }
  return out.str();
}

struct SweepInstance {
  std::uint64_t id = 0;
  Report report;
};

// Tidy plot data: one row per (instance, policy).
inline std::string plot_csv(const std::vector<SweepInstance>& instances) {
  std::ostringstream out;
  out << "instance,source,group,fluctuation,policy,total_cost,normalized_cost,competitive_ratio,"
         "expected_normalized_cost\n";
  for (const auto& inst : instances) {
    const auto& rep = inst.report;
    std::string source = "file";
    if (const auto* s = std::get_if<SyntheticSpec>(&rep.config.trace)) source = std::string(to_string(s->pattern));
    for (const auto& r : rep.results) {
      out << inst.id << ',' << source << ',' << to_string(rep.stats.group) << ','
          << format_number(rep.stats.fluctuation) << ',' << r.label << ',' << format_number(r.cost.total) << ','
          << format_number(r.cost.normalized_to_on_demand.value_or(1.0)) << ',';
      if (r.competitive_ratio) out << format_number(*r.competitive_ratio);
      out << ',';
      if (r.expected_normalized) out << format_number(*r.expected_normalized);
      out << '\n';
    }
  }
  return out.str();
}

struct SweepConfig {
  PricingModel pricing{1.0, 0.0, 1};
  std::optional<double> fee_dollars;
  std::vector<PolicySpec> policies;
  std::vector<Pattern> patterns{Pattern::kPulse, Pattern::kBursty, Pattern::kConstant};
  std::size_t per_pattern = 100;
  std::int64_t length = 240;
  Count amplitude = 3;
  std::optional<std::int64_t> spacing;  // pulse spacing; defaults to 2 * period + 1
  OracleMethod oracle = OracleMethod::kDp;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

// Config of sweep instance `id`. The trace seed and every randomized
// policy seed are base seed + id. Amplitude cycles through 1..amplitude and
// pulse spacing through spacing..spacing + period - 1.
inline ExperimentConfig sweep_instance_config(const SweepConfig& sweep, std::uint64_t id) {
  const std::size_t pattern_index = static_cast<std::size_t>(id / sweep.per_pattern);
  SyntheticSpec spec;
  spec.pattern = sweep.patterns.at(pattern_index);
  spec.length = sweep.length;
  spec.amplitude = sweep.amplitude > 0 ? 1 + static_cast<Count>(id % static_cast<std::uint64_t>(sweep.amplitude)) : 0;
  spec.seed = sweep.seed + id;
  const std::int64_t base_spacing = sweep.spacing.value_or(2 * sweep.pricing.period() + 1);
  spec.spacing = base_spacing + static_cast<std::int64_t>(id % static_cast<std::uint64_t>(sweep.pricing.period()));

  ExperimentConfig config;
  config.pricing = sweep.pricing;
  config.fee_dollars = sweep.fee_dollars;
  config.policies = sweep.policies;
  for (auto& p : config.policies) {
    if (p.kind == PolicyKind::kRandomized) p.config.seed = sweep.seed + id;
  }
  config.trace = spec;
  config.oracle = sweep.oracle;
  config.seed = sweep.seed + id;
  return config;
}

// Evaluates every instance, possibly on several threads; the result is
// ordered by instance id regardless of scheduling.
inline std::vector<SweepInstance> run_sweep(const SweepConfig& sweep) {
  if (sweep.policies.empty()) throw ConfigError("no policies selected");
  if (sweep.patterns.empty() || sweep.per_pattern == 0) throw ConfigError("empty sweep");
  for (const auto& spec : sweep.policies) validate(spec.config, sweep.pricing);

  const std::size_t total = sweep.patterns.size() * sweep.per_pattern;
  std::vector<SweepInstance> out(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      try {
        const auto config = sweep_instance_config(sweep, i);
        out[i] = SweepInstance{i, evaluate_trace(config, load_trace(config.trace))};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, sweep.jobs);
  std::vector<std::thread> threads;
  for (unsigned j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline void write_sweep(const std::vector<SweepInstance>& instances, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream reports(dir / "reports.jsonl");
  std::vector<Report> all;
  for (const auto& inst : instances) {
    reports << report_to_json(inst.report).dump() << '\n';
    all.push_back(inst.report);
  }
  std::ofstream(dir / "summary.csv") << summary_csv(summarize_groups(all));
  std::ofstream(dir / "plot.csv") << plot_csv(instances);
  if (!reports) throw ConfigError("cannot write sweep output to " + dir.string());
}

}  // namespace resv
