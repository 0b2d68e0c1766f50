#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "resv/resv.hpp"

namespace resv {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "resv_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string without_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.find("\"generated_at\"") == std::string::npos) out += line + '\n';
  }
  return out;
}

ExperimentConfig config_for(const DemandTrace& trace, const PricingModel& pricing, const std::string& name) {
  const auto path = scratch(name + ".csv");
  std::ofstream(path) << serialize_trace(trace);
  ExperimentConfig config;
  config.pricing = pricing;
  config.policies = default_policies(3, pricing.period() > 2 ? 2 : 0);
  config.trace = path;
  config.oracle = OracleMethod::kDp;
  config.seed = 3;
  return config;
}

double normalized(const Report& report, std::string_view label) {
  const auto* r = report.find(label);
  EXPECT_NE(r, nullptr) << label;
  return r ? *r->cost.normalized_to_on_demand : 0.0;
}

TEST(RunExperiment, StableDemandFavoursReservations) {
  // Reserving pays off only when p * tau exceeds the fee, hence tau = 50 at p = 0.1.
  const PricingModel pricing(0.1, 0.49, 50);
  const auto report = evaluate_trace(config_for(DemandTrace(std::vector<Count>(50, 2)), pricing, "stable"),
                                     DemandTrace(std::vector<Count>(50, 2)));
  EXPECT_DOUBLE_EQ(normalized(report, "all-on-demand"), 1.0);
  const double reserved = normalized(report, "all-reserved");
  EXPECT_LT(reserved, 1.0);
  for (const auto& r : report.results) EXPECT_LE(reserved, *r.cost.normalized_to_on_demand + 1e-12) << r.label;
  ASSERT_TRUE(report.oracle);
  EXPECT_NEAR(report.oracle->cost, report.find("all-reserved")->cost.total, 1e-9);
  EXPECT_EQ(report.stats.group, FluctuationGroup::kStable);
}

TEST(RunExperiment, SparsePulsesFavourOnDemand) {
  const PricingModel pricing(0.1, 0.49, 24);
  SyntheticSpec spec;
  spec.pattern = Pattern::kPulse;
  spec.length = 240;
  spec.amplitude = 2;
  spec.spacing = 49;
  ExperimentConfig config;
  config.pricing = pricing;
  config.policies = default_policies(1);
  config.trace = spec;
  const auto report = run_experiment(config);
  EXPECT_GT(normalized(report, "all-reserved"), 1.0);
  EXPECT_NEAR(normalized(report, "deterministic"), 1.0, 1e-12);
  EXPECT_EQ(report.stats.group, FluctuationGroup::kHigh);
  ASSERT_TRUE(report.oracle);
  EXPECT_NEAR(*report.find("all-on-demand")->competitive_ratio, 1.0, 1e-12);
}

TEST(RunExperiment, ZeroTraceIsDegenerate) {
  const PricingModel pricing(0.1, 0.5, 4);
  const DemandTrace trace{0, 0, 0, 0, 0};
  const auto report = evaluate_trace(config_for(trace, pricing, "zero"), trace);
  EXPECT_TRUE(report.degenerate);
  for (const auto& r : report.results) {
    EXPECT_EQ(*r.cost.normalized_to_on_demand, 1.0) << r.label;
    EXPECT_EQ(*r.competitive_ratio, 1.0) << r.label;
  }
}

TEST(RunExperiment, RandomizedCarriesSeedThresholdAndExpectation) {
  const PricingModel pricing(0.3, 0.4, 4);
  const DemandTrace trace{1, 2, 2, 3, 0, 1, 2};
  const auto report = evaluate_trace(config_for(trace, pricing, "rand"), trace);
  const auto* r = report.find("randomized");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->spec.config.seed, 3u);
  EXPECT_EQ(*r->sampled_threshold, sample_threshold(pricing, 3));
  EXPECT_NEAR(*r->expected_cost, expected_cost_exact(trace, pricing), 1e-12);
  const auto* w = report.find("randomized-w2");
  ASSERT_NE(w, nullptr);
  EXPECT_NEAR(*w->expected_cost, expected_cost_exact(trace, pricing, 2), 1e-12);
  EXPECT_FALSE(report.find("deterministic")->expected_cost);
}

TEST(RunExperiment, IntractableOracleBecomesWarning) {
  SyntheticSpec spec;
  spec.pattern = Pattern::kConstant;
  spec.length = 300;
  spec.amplitude = 40;
  ExperimentConfig config;
  config.pricing = PricingModel(0.1, 0.5, 60);
  config.policies = default_policies(0);
  config.trace = spec;
  const auto report = run_experiment(config);
  EXPECT_FALSE(report.oracle);
  ASSERT_EQ(report.warnings.size(), 1u);
  for (const auto& r : report.results) EXPECT_FALSE(r.competitive_ratio);
}

TEST(RunExperiment, RejectsBadConfig) {
  ExperimentConfig config;
  config.pricing = PricingModel(0.1, 0.5, 4);
  config.trace = SyntheticSpec{};
  EXPECT_THROW(run_experiment(config), ConfigError);
  config.policies = {{PolicyKind::kDeterministic, {std::nullopt, 4, 0}}};
  EXPECT_THROW(run_experiment(config), std::invalid_argument);
  config.policies = {{PolicyKind::kDeterministic, {}}, {PolicyKind::kDeterministic, {}}};
  EXPECT_THROW(run_experiment(config), ConfigError);
  config.policies = {{PolicyKind::kDeterministic, {}}};
  config.trace = fs::path("/nonexistent/trace.csv");
  EXPECT_THROW(run_experiment(config), ConfigError);
}

TEST(ReportJson, RoundTrips) {
  const PricingModel pricing(0.3, 0.4, 4);
  const DemandTrace trace{1, 2, 2, 3, 0, 1, 2};
  auto config = config_for(trace, pricing, "json");
  config.fee_dollars = 69.0;
  config.out = scratch("json.report");
  config.policies.push_back({PolicyKind::kDeterministic, {1.25, 0, 0}});
  auto report = run_experiment(config);
  const auto text = report_to_json(report).dump(2);
  const auto back = report_from_json(json::parse(text));
  EXPECT_EQ(back, report);
  EXPECT_EQ(back.generated_at, report.generated_at);
  EXPECT_EQ(report_to_json(back).dump(2), text);
  EXPECT_EQ(report_from_json(json::parse(slurp(*config.out))), report);

  SyntheticSpec spec;
  spec.pattern = Pattern::kBursty;
  config.trace = spec;
  config.oracle = OracleMethod::kNone;
  config.out.reset();
  report = run_experiment(config);
  EXPECT_EQ(report_from_json(report_to_json(report)), report);
}

TEST(ReportJson, RejectsOtherSchemaVersion) {
  ExperimentConfig config;
  config.pricing = PricingModel(0.1, 0.5, 4);
  config.policies = default_policies(0);
  auto j = report_to_json(run_experiment(config));
  j["schema_version"] = kReportSchemaVersion + 1;
  EXPECT_THROW(report_from_json(j), ConfigError);
}

TEST(RunExperiment, SameConfigGivesIdenticalBytes) {
  const PricingModel pricing(0.3, 0.4, 4);
  SyntheticSpec spec;
  spec.pattern = Pattern::kBursty;
  spec.length = 60;
  spec.amplitude = 2;
  spec.seed = 11;
  ExperimentConfig config;
  config.pricing = pricing;
  config.policies = default_policies(11, 3);
  config.trace = spec;
  config.out = scratch("a.json");
  run_experiment(config);
  const auto first = slurp(*config.out);
  run_experiment(config);
  const auto second = slurp(*config.out);
  EXPECT_NE(first.find("generated_at"), std::string::npos);
  EXPECT_EQ(without_timestamp(first), without_timestamp(second));
}

TEST(SummarizeGroups, SingleAndRepeatedReports) {
  const PricingModel pricing(0.3, 0.4, 4);
  const DemandTrace trace{1, 2, 2, 3, 0, 1, 2};
  const auto report = evaluate_trace(config_for(trace, pricing, "sum"), trace);
  const auto one = summarize_groups({report});
  const auto two = summarize_groups({report, report});
  ASSERT_EQ(one.size(), 2 * report.results.size());
  ASSERT_EQ(one.size(), two.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    const auto& r = report.results[k % report.results.size()];
    EXPECT_EQ(one[k].group, k < report.results.size() ? "all" : std::string(to_string(report.stats.group)));
    EXPECT_EQ(one[k].policy, r.label);
    EXPECT_EQ(one[k].count, 1u);
    EXPECT_EQ(two[k].count, 2u);
    EXPECT_DOUBLE_EQ(one[k].mean_normalized, *r.cost.normalized_to_on_demand);
    EXPECT_DOUBLE_EQ(two[k].mean_normalized, one[k].mean_normalized);
    EXPECT_EQ(one[k].mean_expected_normalized.has_value(), r.expected_normalized.has_value());
  }
  EXPECT_THROW(summarize_groups({}), std::invalid_argument);
  const auto csv = summary_csv(one);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "group,policy,count,mean_normalized_cost,mean_expected_normalized_cost");
}

SweepConfig small_sweep(unsigned jobs) {
  SweepConfig sweep;
  sweep.pricing = PricingModel(0.1, 0.49, 6);
  sweep.policies = default_policies(5, 2);
  sweep.per_pattern = 6;
  sweep.length = 48;
  sweep.seed = 100;
  sweep.jobs = jobs;
  return sweep;
}

TEST(RunSweep, ParallelMatchesSerial) {
  const auto serial = run_sweep(small_sweep(1));
  const auto parallel = run_sweep(small_sweep(4));
  ASSERT_EQ(serial.size(), 18u);
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].id, i);
    EXPECT_EQ(parallel[i].id, i);
    EXPECT_EQ(parallel[i].report, serial[i].report);
  }
}

TEST(RunSweep, DerivesPerInstanceSeeds) {
  const auto sweep = small_sweep(1);
  const auto config = sweep_instance_config(sweep, 7);
  EXPECT_EQ(config.seed, 107u);
  const auto& spec = std::get<SyntheticSpec>(config.trace);
  EXPECT_EQ(spec.pattern, Pattern::kBursty);
  EXPECT_EQ(spec.seed, 107u);
  for (const auto& p : config.policies) {
    if (p.kind == PolicyKind::kRandomized) {
      EXPECT_EQ(p.config.seed, 107u);
    }
  }
}

TEST(WriteSweep, EmitsReportsSummaryAndPlotData) {
  const auto dir = scratch("sweep");
  fs::remove_all(dir);
  const auto instances = run_sweep(small_sweep(2));
  write_sweep(instances, dir);
  std::ifstream reports(dir / "reports.jsonl");
  std::size_t lines = 0;
  for (std::string line; std::getline(reports, line); ++lines) {
    EXPECT_EQ(report_from_json(json::parse(line)), instances[lines].report);
  }
  EXPECT_EQ(lines, instances.size());
  const auto plot = slurp(dir / "plot.csv");
  EXPECT_EQ(static_cast<std::size_t>(std::count(plot.begin(), plot.end(), '\n')),
            1 + instances.size() * instances.front().report.results.size());
  EXPECT_NE(slurp(dir / "summary.csv").find("stable,all-reserved"), std::string::npos);
}

int run_cli(const std::string& args) {
  const std::string command = std::string(RESV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const auto trace = scratch("cli.csv");
  std::ofstream(trace) << "t,demand\n1,1\n2,1\n3,1\n";
  const auto bad = scratch("bad.csv");
  std::ofstream(bad) << "1\n-4\n";
  const std::string pricing = "--alpha 0.5 --rate 1 --tau 3";
  EXPECT_EQ(run_cli("simulate " + pricing + " --trace " + trace.string()), 0);
  EXPECT_EQ(run_cli("oracle " + pricing + " --trace " + trace.string()), 0);
  EXPECT_EQ(run_cli("oracle " + pricing + " --trace " + trace.string() + " --oracle brute"), 0);
  EXPECT_EQ(run_cli("ratio " + pricing + " --trace " + trace.string() + " --policy randomized --seed 4"), 0);
  EXPECT_EQ(run_cli("classify --trace " + trace.string()), 0);
  EXPECT_EQ(run_cli("generate --synthetic diurnal --length 48 --amplitude 4"), 0);
  EXPECT_EQ(run_cli("simulate --ondemand-dollars 0.08 --reserve-fee-dollars 69 --reserved-dollars 0.039 --tau 100 "
                    "--synthetic pulse --length 300"),
            0);

  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("simulate --alpha 1.5 --rate 1 --tau 3 --trace " + trace.string()), 2);
  EXPECT_EQ(run_cli("simulate " + pricing + " --trace " + bad.string()), 2);
  EXPECT_EQ(run_cli("simulate " + pricing + " --trace /nonexistent/x.csv"), 2);
  EXPECT_EQ(run_cli("simulate " + pricing + " --trace " + trace.string() + " --window 3"), 2);
  EXPECT_EQ(run_cli("simulate " + pricing + " --trace " + trace.string() + " --policy bogus"), 2);
  EXPECT_EQ(run_cli("simulate " + pricing + " --trace " + trace.string() + " --oracle magic"), 2);
  EXPECT_EQ(run_cli("simulate --rate 1 --tau 3 --trace " + trace.string()), 2);
  EXPECT_EQ(run_cli("simulate " + pricing), 2);
  EXPECT_EQ(run_cli("simulate " + pricing + " --unknown-flag"), 2);
  EXPECT_EQ(run_cli("oracle " + pricing + " --trace " + trace.string() + " --oracle none"), 2);

  EXPECT_EQ(run_cli("oracle --alpha 0.5 --rate 0.1 --tau 60 --synthetic constant --length 300 --amplitude 40"), 3);
  EXPECT_EQ(run_cli("ratio --alpha 0.5 --rate 0.1 --tau 60 --synthetic constant --length 300 --amplitude 40"), 3);
  // A report is still produced when the oracle is optional.
  EXPECT_EQ(run_cli("simulate --alpha 0.5 --rate 0.1 --tau 60 --synthetic constant --length 300 --amplitude 40"), 0);
}

TEST(Cli, SimulateWritesParsableReport) {
  const auto out = scratch("cli_report.json");
  fs::remove(out);
  ASSERT_EQ(run_cli("simulate --alpha 0.49 --rate 0.1 --tau 6 --synthetic bursty --length 40 --amplitude 2 "
                    "--window 2 --seed 9 --out " + out.string()),
            0);
  const auto report = report_from_json(json::parse(slurp(out)));
  EXPECT_NE(report.find("randomized-w2"), nullptr);
  EXPECT_NE(report.find("deterministic-w2"), nullptr);
  EXPECT_EQ(report.config.seed, 9u);
}

TEST(Cli, SweepWritesOutputs) {
  const auto dir = scratch("cli_sweep");
  fs::remove_all(dir);
  ASSERT_EQ(run_cli("sweep --alpha 0.49 --rate 0.1 --tau 6 --count 3 --length 36 --jobs 2 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "reports.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "plot.csv"));
}

}  // namespace
}  // namespace resv
