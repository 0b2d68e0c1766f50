#pragma once

// JSON encoding of experiment configs and reports.

#include <optional>
#include <string>

#include "json.hpp"

#include "resv/error.hpp"
#include "resv/experiment.hpp"

namespace resv {

using nlohmann::json;

namespace detail {

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    v.reset();
  } else {
    v = it->get<T>();
  }
}

template <class Enum, class Parse>
Enum get_enum(const json& j, const char* key, Parse parse) {
  const auto name = j.at(key).get<std::string>();
  const auto value = parse(name);
  if (!value) throw ConfigError(std::string("unknown ") + key + " '" + name + "'");
  return *value;
}

}  // namespace detail

inline json pricing_to_json(const PricingModel& p) {
  return json{{"on_demand_rate", p.rate()}, {"discount", p.discount()}, {"period", p.period()}};
}

inline PricingModel pricing_from_json(const json& j) {
  return PricingModel(j.at("on_demand_rate").get<double>(), j.at("discount").get<double>(),
                      j.at("period").get<std::int64_t>());
}

inline void to_json(json& j, const SyntheticSpec& s) {
  j = json{{"pattern", to_string(s.pattern)}, {"length", s.length},   {"amplitude", s.amplitude},
           {"seed", s.seed},                  {"spacing", s.spacing}, {"mean_on", s.mean_on},
           {"mean_off", s.mean_off}};
}

inline void from_json(const json& j, SyntheticSpec& s) {
  s.pattern = detail::get_enum<Pattern>(j, "pattern", parse_pattern);
  s.length = j.at("length").get<std::int64_t>();
  s.amplitude = j.at("amplitude").get<Count>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.spacing = j.at("spacing").get<std::int64_t>();
  s.mean_on = j.at("mean_on").get<double>();
  s.mean_off = j.at("mean_off").get<double>();
}

inline void to_json(json& j, const PolicySpec& p) {
  j = json{{"kind", to_string(p.kind)}, {"window", p.config.window}, {"seed", p.config.seed}};
  detail::put(j, "threshold", p.config.threshold);
}

inline void from_json(const json& j, PolicySpec& p) {
  p.kind = detail::get_enum<PolicyKind>(j, "kind", parse_policy_kind);
  p.config.window = j.at("window").get<std::int64_t>();
  p.config.seed = j.at("seed").get<std::uint64_t>();
  detail::get(j, "threshold", p.config.threshold);
}

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json::object();
  j["pricing"] = pricing_to_json(c.pricing);
  detail::put(j["pricing"], "fee_dollars", c.fee_dollars);
  j["policies"] = c.policies;
  if (const auto* path = std::get_if<std::filesystem::path>(&c.trace)) {
    j["trace"] = json{{"kind", "file"}, {"path", path->string()}};
  } else {
    j["trace"] = std::get<SyntheticSpec>(c.trace);
    j["trace"]["kind"] = "synthetic";
  }
  j["oracle"] = to_string(c.oracle);
  j["seed"] = c.seed;
  j["out"] = c.out ? json(c.out->string()) : json(nullptr);
}

inline void from_json(const json& j, ExperimentConfig& c) {
  c.pricing = pricing_from_json(j.at("pricing"));
  detail::get(j.at("pricing"), "fee_dollars", c.fee_dollars);
  c.policies = j.at("policies").get<std::vector<PolicySpec>>();
  const auto& trace = j.at("trace");
  if (trace.at("kind").get<std::string>() == "file") {
    c.trace = std::filesystem::path(trace.at("path").get<std::string>());
  } else {
    c.trace = trace.get<SyntheticSpec>();
  }
  c.oracle = detail::get_enum<OracleMethod>(j, "oracle", parse_oracle_method);
  c.seed = j.at("seed").get<std::uint64_t>();
  std::optional<std::string> out;
  detail::get(j, "out", out);
  c.out = out ? std::optional<std::filesystem::path>(*out) : std::nullopt;
}

inline void to_json(json& j, const CostReport& c) {
  j = json{{"total", c.total},
           {"on_demand_cost", c.on_demand_cost},
           {"reservation_fees", c.reservation_fees},
           {"reserved_usage_cost", c.reserved_usage_cost},
           {"num_reservations", c.num_reservations}};
  detail::put(j, "normalized_to_on_demand", c.normalized_to_on_demand);
}

inline void from_json(const json& j, CostReport& c) {
  c.total = j.at("total").get<double>();
  c.on_demand_cost = j.at("on_demand_cost").get<double>();
  c.reservation_fees = j.at("reservation_fees").get<double>();
  c.reserved_usage_cost = j.at("reserved_usage_cost").get<double>();
  c.num_reservations = j.at("num_reservations").get<Count>();
  detail::get(j, "normalized_to_on_demand", c.normalized_to_on_demand);
}

inline void to_json(json& j, const PolicyResult& r) {
  j = json{{"label", r.label}, {"policy", r.spec}, {"cost", r.cost}};
  detail::put(j, "sampled_threshold", r.sampled_threshold);
  detail::put(j, "competitive_ratio", r.competitive_ratio);
  detail::put(j, "expected_cost", r.expected_cost);
  detail::put(j, "expected_normalized", r.expected_normalized);
  detail::put(j, "expected_competitive_ratio", r.expected_competitive_ratio);
}

inline void from_json(const json& j, PolicyResult& r) {
  r.label = j.at("label").get<std::string>();
  r.spec = j.at("policy").get<PolicySpec>();
  r.cost = j.at("cost").get<CostReport>();
  detail::get(j, "sampled_threshold", r.sampled_threshold);
  detail::get(j, "competitive_ratio", r.competitive_ratio);
  detail::get(j, "expected_cost", r.expected_cost);
  detail::get(j, "expected_normalized", r.expected_normalized);
  detail::get(j, "expected_competitive_ratio", r.expected_competitive_ratio);
}

inline void to_json(json& j, const TraceStats& s) {
  j = json{{"mean", s.mean}, {"std_dev", s.std_dev}, {"fluctuation", s.fluctuation}, {"group", to_string(s.group)}};
}

inline void from_json(const json& j, TraceStats& s) {
  s.mean = j.at("mean").get<double>();
  s.std_dev = j.at("std_dev").get<double>();
  s.fluctuation = j.at("fluctuation").get<double>();
  s.group = detail::get_enum<FluctuationGroup>(j, "group", parse_group);
}

inline json report_to_json(const Report& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["config"] = r.config;
  j["trace"] = json{{"length", r.length}, {"total_demand", r.total_demand}, {"stats", r.stats}};
  detail::put(j, "break_even", r.break_even);
  j["degenerate"] = r.degenerate;
  if (r.oracle) {
    j["oracle"] = json{{"method", to_string(r.oracle->method)},
                       {"cost", r.oracle->cost},
                       {"num_reservations", r.oracle->num_reservations}};
  } else {
    j["oracle"] = nullptr;
  }
  j["results"] = r.results;
  j["warnings"] = r.warnings;
  if (r.generated_at) j["generated_at"] = *r.generated_at;
  return j;
}

inline Report report_from_json(const json& j) {
  Report r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kReportSchemaVersion) {
    throw ConfigError("unsupported report schema_version " + std::to_string(r.schema_version));
  }
  r.config = j.at("config").get<ExperimentConfig>();
  r.length = j.at("trace").at("length").get<std::int64_t>();
  r.total_demand = j.at("trace").at("total_demand").get<Count>();
  r.stats = j.at("trace").at("stats").get<TraceStats>();
  detail::get(j, "break_even", r.break_even);
  r.degenerate = j.at("degenerate").get<bool>();
  if (const auto& o = j.at("oracle"); !o.is_null()) {
    r.oracle = OracleResult{detail::get_enum<OracleMethod>(o, "method", parse_oracle_method),
                            o.at("cost").get<double>(), o.at("num_reservations").get<Count>()};
  }
  r.results = j.at("results").get<std::vector<PolicyResult>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  detail::get(j, "generated_at", r.generated_at);
  return r;
}

}  // namespace resv
