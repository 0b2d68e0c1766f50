#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "resv/policies.hpp"
#include "resv/pricing.hpp"
#include "resv/traces.hpp"

namespace resv {

enum class OracleMethod { kDp, kBrute, kNone };

inline std::string_view to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::kDp: return "dp";
    case OracleMethod::kBrute: return "brute";
    case OracleMethod::kNone: return "none";
  }
  return "?";
}

inline std::optional<OracleMethod> parse_oracle_method(std::string_view name) {
  for (auto m : {OracleMethod::kDp, OracleMethod::kBrute, OracleMethod::kNone}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

struct PolicySpec {
  PolicyKind kind = PolicyKind::kDeterministic;
  PolicyConfig config;

  // Unique name within a run, e.g. "randomized-w6".
  std::string label() const {
    std::string name(to_string(kind));
    if (config.threshold) {
      std::ostringstream z;
      z << *config.threshold;
      name += "-z" + z.str();
    }
    if (config.window > 0) name += "-w" + std::to_string(config.window);
    return name;
  }

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

using TraceSource = std::variant<std::filesystem::path, SyntheticSpec>;

struct ExperimentConfig {
  PricingModel pricing{1.0, 0.0, 1};
  // Dollar value of one reservation fee when prices were given in dollars.
  std::optional<double> fee_dollars;
  std::vector<PolicySpec> policies;
  TraceSource trace = SyntheticSpec{};
  OracleMethod oracle = OracleMethod::kDp;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// The five strategies compared in every run unless the caller narrows them.
inline std::vector<PolicySpec> default_policies(std::uint64_t seed, std::int64_t window = 0) {
  std::vector<PolicySpec> out{{PolicyKind::kAllOnDemand, {}},
                              {PolicyKind::kAllReserved, {}},
                              {PolicyKind::kSeparate, {}},
                              {PolicyKind::kDeterministic, {}},
                              {PolicyKind::kRandomized, {std::nullopt, 0, seed}}};
  if (window > 0) {
    out.push_back({PolicyKind::kDeterministic, {std::nullopt, window, 0}});
    out.push_back({PolicyKind::kRandomized, {std::nullopt, window, seed}});
  }
  return out;
}

struct PolicyResult {
  std::string label;
  PolicySpec spec;
  std::optional<double> sampled_threshold;
  CostReport cost;
  std::optional<double> competitive_ratio;
  // Randomized policies: exact expectation over the threshold distribution.
  std::optional<double> expected_cost;
  std::optional<double> expected_normalized;
  std::optional<double> expected_competitive_ratio;

  friend bool operator==(const PolicyResult&, const PolicyResult&) = default;
};

struct OracleResult {
  OracleMethod method = OracleMethod::kDp;
  double cost = 0.0;
  Count num_reservations = 0;

  friend bool operator==(const OracleResult&, const OracleResult&) = default;
};

inline constexpr int kReportSchemaVersion = 1;

struct Report {
  int schema_version = kReportSchemaVersion;
  ExperimentConfig config;
  std::int64_t length = 0;
  Count total_demand = 0;
  TraceStats stats;
  std::optional<double> break_even;
  bool degenerate = false;  // zero total demand; every normalized cost is 1 by convention
  std::optional<OracleResult> oracle;
  std::vector<PolicyResult> results;
  std::vector<std::string> warnings;
  std::optional<std::string> generated_at;  // not part of equality

  const PolicyResult* find(std::string_view label) const {
    for (const auto& r : results) {
      if (r.label == label) return &r;
    }
    return nullptr;
  }

  friend bool operator==(const Report& a, const Report& b) {
    return a.schema_version == b.schema_version && a.config == b.config && a.length == b.length &&
           a.total_demand == b.total_demand && a.stats == b.stats && a.break_even == b.break_even &&
           a.degenerate == b.degenerate && a.oracle == b.oracle && a.results == b.results && a.warnings == b.warnings;
  }
};

}  // namespace resv
