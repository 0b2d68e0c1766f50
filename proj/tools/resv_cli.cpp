// resv: command-line front end for the reservation policies, oracles and
// experiment sweeps.
//
// Exit codes: 0 success, 2 parse or configuration error, 3 oracle required
// but intractable at this scale.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resv/resv.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIntractable = 3;

struct PricingFlags {
  std::optional<double> alpha;
  std::optional<double> rate;
  std::optional<double> ondemand_dollars;
  std::optional<double> fee_dollars;
  std::optional<double> reserved_dollars;
  std::int64_t tau = 0;

  void add(CLI::App& app) {
    app.add_option("--alpha", alpha, "Reservation discount (reserved rate / on-demand rate)");
    app.add_option("--rate", rate, "On-demand rate per slot, normalized to a reservation fee of 1");
    app.add_option("--ondemand-dollars", ondemand_dollars, "Raw on-demand price per slot");
    app.add_option("--reserve-fee-dollars", fee_dollars, "Raw upfront reservation fee");
    app.add_option("--reserved-dollars", reserved_dollars, "Raw reserved usage price per slot");
    app.add_option("--tau", tau, "Reservation period in slots")->required();
  }

  // Returns the normalized model and, for dollar input, the fee used to normalize.
  std::pair<resv::PricingModel, std::optional<double>> resolve() const {
    const bool raw = ondemand_dollars || fee_dollars || reserved_dollars;
    if (raw) {
      if (!(ondemand_dollars && fee_dollars && reserved_dollars)) {
        throw resv::ConfigError("dollar pricing needs --ondemand-dollars, --reserve-fee-dollars and --reserved-dollars");
      }
      if (alpha || rate) throw resv::ConfigError("give either normalized (--alpha/--rate) or dollar prices, not both");
      return {resv::PricingModel::from_dollars(*ondemand_dollars, *fee_dollars, *reserved_dollars, tau), fee_dollars};
    }
    if (!alpha || !rate) throw resv::ConfigError("pricing needs --alpha and --rate (or the dollar flags)");
    return {resv::PricingModel(*rate, *alpha, tau), std::nullopt};
  }
};

struct TraceFlags {
  std::optional<std::string> file;
  std::optional<std::string> pattern;
  std::int64_t length = 240;
  resv::Count amplitude = 1;
  std::optional<std::int64_t> spacing;
  double mean_on = 8.0;
  double mean_off = 16.0;

  void add(CLI::App& app, bool allow_file = true) {
    auto* synthetic = app.add_option("--synthetic,--pattern", pattern, "Synthetic pattern: constant|pulse|diurnal|bursty");
    if (allow_file) {
      auto* f = app.add_option("--trace", file, "Demand CSV (one value per line, or t,demand rows)");
      f->excludes(synthetic);
    }
    app.add_option("--length", length, "Synthetic trace length in slots");
    app.add_option("--amplitude", amplitude, "Synthetic demand amplitude");
    app.add_option("--spacing", spacing, "Pulse spacing in slots (default 2*tau+1)");
    app.add_option("--mean-on", mean_on, "Bursty mean on-phase length");
    app.add_option("--mean-off", mean_off, "Bursty mean off-phase length");
  }

  resv::SyntheticSpec synthetic(std::uint64_t seed, std::int64_t tau) const {
    const auto p = resv::parse_pattern(*pattern);
    if (!p) throw resv::ConfigError("unknown pattern '" + *pattern + "'");
    resv::SyntheticSpec spec;
    spec.pattern = *p;
    spec.length = length;
    spec.amplitude = amplitude;
    spec.seed = seed;
    spec.spacing = spacing.value_or(2 * tau + 1);
    spec.mean_on = mean_on;
    spec.mean_off = mean_off;
    return spec;
  }

  resv::TraceSource source(std::uint64_t seed, std::int64_t tau) const {
    if (file) return std::filesystem::path(*file);
    if (pattern) return synthetic(seed, tau);
    throw resv::ConfigError("give --trace FILE or --synthetic PATTERN");
  }
};

struct PolicyFlags {
  std::vector<std::string> names;
  std::optional<double> threshold;
  std::vector<std::int64_t> windows;

  void add(CLI::App& app, bool single = false) {
    const char* help = "Policy: all-on-demand|all-reserved|separate|deterministic|randomized|all";
    if (single) {
      app.add_option("--policy", names, help)->expected(1);
    } else {
      app.add_option("--policy", names, help);
    }
    app.add_option("--threshold", threshold, "Fixed threshold z in [0, beta] for the deterministic policy");
    app.add_option("--window", windows, "Prediction window(s) w < tau for deterministic/randomized");
  }

  std::vector<resv::PolicySpec> resolve(std::uint64_t seed, const std::string& fallback) const {
    std::vector<std::string> selected = names.empty() ? std::vector<std::string>{fallback} : names;
    std::vector<std::int64_t> ws = windows.empty() ? std::vector<std::int64_t>{0} : windows;
    std::vector<resv::PolicySpec> out;
    for (const auto& name : selected) {
      std::vector<resv::PolicyKind> kinds;
      if (name == "all") {
        kinds = {resv::PolicyKind::kAllOnDemand, resv::PolicyKind::kAllReserved, resv::PolicyKind::kSeparate,
                 resv::PolicyKind::kDeterministic, resv::PolicyKind::kRandomized};
      } else if (const auto k = resv::parse_policy_kind(name)) {
        kinds = {*k};
      } else {
        throw resv::ConfigError("unknown policy '" + name + "'");
      }
      for (const auto kind : kinds) {
        const bool windowed = kind == resv::PolicyKind::kDeterministic || kind == resv::PolicyKind::kRandomized;
        for (const auto w : windowed ? ws : std::vector<std::int64_t>{0}) {
          resv::PolicySpec spec{kind, {}};
          spec.config.window = w;
          if (kind == resv::PolicyKind::kDeterministic) spec.config.threshold = threshold;
          if (kind == resv::PolicyKind::kRandomized) spec.config.seed = seed;
          out.push_back(spec);
        }
      }
    }
    return out;
  }
};

std::optional<resv::OracleMethod> oracle_method(const std::string& name) {
  const auto m = resv::parse_oracle_method(name);
  if (!m) throw resv::ConfigError("unknown oracle '" + name + "'");
  return m;
}

void emit(const std::string& text, const std::optional<std::string>& out) {
  if (out) {
    std::ofstream f(*out);
    if (!f) throw resv::ConfigError("cannot write " + *out);
    f << text;
  } else {
    std::cout << text;
  }
}

resv::json schedule_json(const resv::PurchaseSchedule& s) {
  return resv::json{{"reservations", s.reservations}, {"on_demand", s.on_demand}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online instance reservation: policies, offline optima and experiment sweeps"};
  app.require_subcommand(1);

  PricingFlags pricing_flags;
  TraceFlags trace_flags;
  PolicyFlags policy_flags;
  std::uint64_t seed = 0;
  std::string oracle_name = "dp";
  std::optional<std::string> out;

  auto* simulate = app.add_subcommand("simulate", "Run policies on one trace and write a JSON report");
  pricing_flags.add(*simulate);
  trace_flags.add(*simulate);
  policy_flags.add(*simulate);
  simulate->add_option("--seed", seed, "Seed for synthetic traces and randomized policies");
  simulate->add_option("--oracle", oracle_name, "Offline optimum: dp|brute|none");
  simulate->add_option("--out", out, "Report path (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "Compute the offline optimum of one trace");
  PricingFlags oracle_pricing;
  TraceFlags oracle_trace;
  oracle_pricing.add(*oracle);
  oracle_trace.add(*oracle);
  oracle->add_option("--seed", seed, "Seed for synthetic traces");
  oracle->add_option("--oracle", oracle_name, "dp|brute");
  oracle->add_option("--out", out, "Output path (default stdout)");

  auto* ratio = app.add_subcommand("ratio", "Competitive ratio of one policy against the offline optimum");
  PricingFlags ratio_pricing;
  TraceFlags ratio_trace;
  PolicyFlags ratio_policy;
  ratio_pricing.add(*ratio);
  ratio_trace.add(*ratio);
  ratio_policy.add(*ratio, true);
  ratio->add_option("--seed", seed, "Seed for synthetic traces and randomized policies");
  ratio->add_option("--oracle", oracle_name, "dp|brute");
  ratio->add_option("--out", out, "Output path (default stdout)");

  auto* classify_cmd = app.add_subcommand("classify", "Fluctuation statistics and group of a trace");
  std::string classify_path;
  classify_cmd->add_option("--trace", classify_path, "Demand CSV")->required();
  classify_cmd->add_option("--out", out, "Output path (default stdout)");

  auto* generate = app.add_subcommand("generate", "Write a synthetic demand trace as CSV");
  TraceFlags generate_trace;
  std::int64_t generate_tau = 24;
  generate_trace.add(*generate, false);
  generate->get_option("--synthetic")->required();
  generate->add_option("--seed", seed, "Generator seed");
  generate->add_option("--tau", generate_tau, "Period used for the default pulse spacing");
  generate->add_option("--out", out, "CSV path (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "Evaluate policies over a synthetic multi-group corpus");
  PricingFlags sweep_pricing;
  PolicyFlags sweep_policy;
  std::vector<std::string> sweep_patterns{"pulse", "bursty", "constant"};
  std::size_t per_pattern = 100;
  std::int64_t sweep_length = 240;
  resv::Count sweep_amplitude = 3;
  std::optional<std::int64_t> sweep_spacing;
  unsigned jobs = 1;
  std::string sweep_out;
  sweep_pricing.add(*sweep);
  sweep_policy.add(*sweep);
  sweep->add_option("--patterns", sweep_patterns, "Generators, one group of traces each");
  sweep->add_option("--count", per_pattern, "Traces per pattern");
  sweep->add_option("--length", sweep_length, "Trace length in slots");
  sweep->add_option("--amplitude", sweep_amplitude, "Maximum amplitude (cycles 1..amplitude)");
  sweep->add_option("--spacing", sweep_spacing, "Base pulse spacing (default 2*tau+1)");
  sweep->add_option("--seed", seed, "Base seed; instance i uses seed + i");
  sweep->add_option("--oracle", oracle_name, "dp|brute|none");
  sweep->add_option("--jobs", jobs, "Worker threads");
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) {
      const auto [pricing, fee] = pricing_flags.resolve();
      resv::ExperimentConfig config;
      config.pricing = pricing;
      config.fee_dollars = fee;
      config.policies = policy_flags.resolve(seed, "all");
      config.trace = trace_flags.source(seed, pricing.period());
      config.oracle = *oracle_method(oracle_name);
      config.seed = seed;
      if (out) config.out = *out;
      const auto report = resv::run_experiment(config);
      if (!out) std::cout << resv::report_to_json(report).dump(2) << '\n';
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      return 0;
    }

    if (*oracle || *ratio) {
      auto& pf = *oracle ? oracle_pricing : ratio_pricing;
      auto& tf = *oracle ? oracle_trace : ratio_trace;
      const auto [pricing, fee] = pf.resolve();
      const auto trace = resv::load_trace(tf.source(seed, pricing.period()));
      const auto method = *oracle_method(oracle_name);
      if (method == resv::OracleMethod::kNone) throw resv::ConfigError("this command needs --oracle dp or brute");
      resv::OracleSolution best;
      try {
        if (method == resv::OracleMethod::kDp) {
          best = resv::solve_dp(trace, pricing);
        } else {
          const auto bf = resv::solve_brute_force(trace, pricing);
          best = {bf.cost, bf.schedule};
        }
      } catch (const resv::Intractable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIntractable;
      }

      resv::json j;
      if (*oracle) {
        j = {{"method", std::string(resv::to_string(method))},
             {"cost", best.cost},
             {"num_reservations", best.schedule.num_reservations()},
             {"schedule", schedule_json(best.schedule)}};
      } else {
        const auto specs = ratio_policy.resolve(seed, "deterministic");
        if (specs.size() != 1) throw resv::ConfigError("ratio takes exactly one policy and window");
        const auto& spec = specs.front();
        const auto schedule = resv::run_policy(spec.kind, spec.config, trace, pricing);
        const double cost = resv::evaluate_cost(trace, schedule, pricing).total;
        j = {{"policy", spec.label()},
             {"cost", cost},
             {"oracle_cost", best.cost},
             {"ratio", resv::competitive_ratio(cost, best.cost)},
             {"deterministic_bound", resv::deterministic_bound(pricing.discount())},
             {"randomized_bound", resv::randomized_bound(pricing.discount())}};
        if (spec.kind == resv::PolicyKind::kRandomized) {
          const auto w = spec.config.window > 0 ? std::optional<std::int64_t>(spec.config.window) : std::nullopt;
          const double expected = resv::expected_cost_exact(trace, pricing, w);
          j["sampled_threshold"] = *schedule.threshold;
          j["expected_cost"] = expected;
          j["expected_ratio"] = resv::competitive_ratio(expected, best.cost);
        }
      }
      if (fee) j["fee_dollars"] = *fee;
      emit(j.dump(2) + "\n", out);
      return 0;
    }

    if (*classify_cmd) {
      const auto trace = resv::load_trace(std::filesystem::path(classify_path));
      const auto stats = resv::classify(trace);
      resv::json j = stats;
      j["length"] = trace.length();
      emit(j.dump(2) + "\n", out);
      return 0;
    }

    if (*generate) {
      const auto trace = resv::generate_synthetic(generate_trace.synthetic(seed, generate_tau));
      emit(resv::serialize_trace(trace), out);
      return 0;
    }

    if (*sweep) {
      const auto [pricing, fee] = sweep_pricing.resolve();
      resv::SweepConfig config;
      config.pricing = pricing;
      config.fee_dollars = fee;
      config.policies = sweep_policy.resolve(seed, "all");
      config.patterns.clear();
      for (const auto& name : sweep_patterns) {
        const auto p = resv::parse_pattern(name);
        if (!p) throw resv::ConfigError("unknown pattern '" + name + "'");
        config.patterns.push_back(*p);
      }
      config.per_pattern = per_pattern;
      config.length = sweep_length;
      config.amplitude = sweep_amplitude;
      config.spacing = sweep_spacing;
      config.oracle = *oracle_method(oracle_name);
      config.seed = seed;
      config.jobs = jobs;
      const auto instances = resv::run_sweep(config);
      resv::write_sweep(instances, sweep_out);
      std::size_t warned = 0;
      for (const auto& inst : instances) warned += inst.report.warnings.empty() ? 0 : 1;
      if (warned > 0) std::cerr << "warning: oracle skipped on " << warned << " instances\n";
      std::cout << resv::summary_csv(resv::summarize_groups([&] {
        std::vector<resv::Report> all;
        for (const auto& inst : instances) all.push_back(inst.report);
        return all;
      }()));
      return 0;
    }
  } catch (const resv::Intractable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIntractable;
  } catch (const resv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
