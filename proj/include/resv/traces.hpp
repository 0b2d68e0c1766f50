#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "resv/demand_trace.hpp"
#include "resv/error.hpp"
#include "resv/random.hpp"

namespace resv {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::optional<Count> parse_integer(std::string_view field) {
  Count value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
  return value;
}

inline bool is_header(std::string_view line) {
  const auto comma = line.find(',');
  if (comma == std::string_view::npos) return false;
  return trim(line.substr(0, comma)) == "t" && trim(line.substr(comma + 1)) == "demand";
}

}  // namespace detail

// Reads a demand curve.
//
// Accepted forms: one demand per line with the slot implied (starting at 1),
// or an optional `t,demand` header followed by rows `t,demand` with t = 1, 2, ...
// in order. Every slot must be present; nothing is zero-filled.
inline DemandTrace parse_trace(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
  if (!lines.empty() && lines.front().starts_with("\xEF\xBB\xBF")) lines.front().erase(0, 3);

  std::vector<Count> demands;
  std::optional<bool> indexed;
  std::size_t first_row = 0;
  if (!lines.empty() && detail::is_header(detail::trim(lines.front()))) {
    indexed = true;
    first_row = 1;
  }

  for (std::size_t i = first_row; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = detail::trim(lines[i]);
    if (line.empty()) throw ParseError(line_no, "empty line");

    const auto comma = line.find(',');
    const bool has_index = comma != std::string_view::npos;
    if (!indexed) indexed = has_index;
    if (*indexed != has_index) throw ParseError(line_no, "mixed indexed and unindexed rows");

    std::string_view demand_field = line;
    if (has_index) {
      demand_field = detail::trim(line.substr(comma + 1));
      if (demand_field.find(',') != std::string_view::npos) throw ParseError(line_no, "too many fields");
      const auto slot = detail::parse_integer(detail::trim(line.substr(0, comma)));
      if (!slot) throw ParseError(line_no, "slot index is not an integer");
      const Count expected = static_cast<Count>(demands.size()) + 1;
      if (*slot < expected) throw ParseError(line_no, "duplicate or out-of-order slot index " + std::to_string(*slot));
      if (*slot > expected) throw ParseError(line_no, "gap in slot indices: expected " + std::to_string(expected));
    }
    const auto demand = detail::parse_integer(demand_field);
    if (!demand) throw ParseError(line_no, "demand is not an integer");
    if (*demand < 0) throw ParseError(line_no, "negative demand");
    demands.push_back(*demand);
  }
  if (demands.empty()) throw ParseError(lines.size() + 1, "trace has no slots");
  return DemandTrace(std::move(demands));
}

inline DemandTrace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

inline DemandTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file " + path.string());
  return parse_trace(in);
}

inline std::string serialize_trace(const DemandTrace& trace, bool headered = true) {
  std::ostringstream out;
  if (headered) out << "t,demand\n";
  Slot t = 1;
  for (Count d : trace.values()) {
    if (headered) out << t++ << ',';
    out << d << '\n';
  }
  return out.str();
}

enum class Pattern { kConstant, kPulse, kDiurnal, kBursty };

inline std::string_view to_string(Pattern p) {
  switch (p) {
    case Pattern::kConstant: return "constant";
    case Pattern::kPulse: return "pulse";
    case Pattern::kDiurnal: return "diurnal";
    case Pattern::kBursty: return "bursty";
  }
  return "?";
}

inline std::optional<Pattern> parse_pattern(std::string_view name) {
  for (Pattern p : {Pattern::kConstant, Pattern::kPulse, Pattern::kDiurnal, Pattern::kBursty}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

struct SyntheticSpec {
  Pattern pattern = Pattern::kConstant;
  std::int64_t length = 1;
  Count amplitude = 0;
  std::uint64_t seed = 0;
  std::int64_t spacing = 48;      // pulse: distance between spike slots
  double mean_on = 8.0;           // bursty: mean dwell in the on state
  double mean_off = 16.0;         // bursty: mean dwell in the off state

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

inline constexpr std::int64_t kDiurnalPeriod = 24;

// Deterministic in the spec. Pulse traces put spikes at slots 1, 1 + spacing, ...
// Diurnal traces are a rounded sinusoid of period 24 with a seed-derived phase.
// Bursty traces alternate on/off phases with geometric dwell times.
inline DemandTrace generate_synthetic(const SyntheticSpec& spec) {
  if (spec.length < 1) throw std::invalid_argument("synthetic trace length must be at least 1");
  if (spec.amplitude < 0) throw std::invalid_argument("amplitude must be non-negative");
  const auto n = static_cast<std::size_t>(spec.length);
  std::vector<Count> d(n, 0);

  switch (spec.pattern) {
    case Pattern::kConstant:
      std::fill(d.begin(), d.end(), spec.amplitude);
      break;
    case Pattern::kPulse: {
      if (spec.spacing < 1) throw std::invalid_argument("pulse spacing must be positive");
      for (std::size_t t = 0; t < n; t += static_cast<std::size_t>(spec.spacing)) d[t] = spec.amplitude;
      break;
    }
    case Pattern::kDiurnal: {
      const auto phase = static_cast<std::size_t>(spec.seed % kDiurnalPeriod);
      for (std::size_t t = 0; t < n; ++t) {
        const auto step = static_cast<double>((t + phase) % kDiurnalPeriod);
        const double angle = 2.0 * std::numbers::pi * step / kDiurnalPeriod;
        d[t] = std::llround(static_cast<double>(spec.amplitude) * 0.5 * (1.0 + std::sin(angle)));
      }
      break;
    }
    case Pattern::kBursty: {
      if (!(spec.mean_on >= 1.0 && spec.mean_off >= 1.0)) throw std::invalid_argument("mean dwell times must be >= 1");
      SeededRng rng(spec.seed);
      bool on = rng.uniform() < spec.mean_on / (spec.mean_on + spec.mean_off);
      std::size_t t = 0;
      while (t < n) {
        const auto dwell = static_cast<std::size_t>(rng.geometric(1.0 / (on ? spec.mean_on : spec.mean_off)));
        for (std::size_t k = 0; k < dwell && t < n; ++k, ++t) d[t] = on ? spec.amplitude : 0;
        on = !on;
      }
      break;
    }
  }
  return DemandTrace(std::move(d));
}

enum class FluctuationGroup { kHigh, kMedium, kStable };

inline std::string_view to_string(FluctuationGroup g) {
  switch (g) {
    case FluctuationGroup::kHigh: return "high";
    case FluctuationGroup::kMedium: return "medium";
    case FluctuationGroup::kStable: return "stable";
  }
  return "?";
}

inline std::optional<FluctuationGroup> parse_group(std::string_view name) {
  for (auto g : {FluctuationGroup::kHigh, FluctuationGroup::kMedium, FluctuationGroup::kStable}) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

struct TraceStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double fluctuation = 0.0;
  FluctuationGroup group = FluctuationGroup::kStable;

  friend bool operator==(const TraceStats&, const TraceStats&) = default;
};

inline constexpr Count kHighFluctuation = 5;
inline constexpr Count kMediumFluctuation = 1;

inline FluctuationGroup group_for(double fluctuation) {
  if (fluctuation >= static_cast<double>(kHighFluctuation)) return FluctuationGroup::kHigh;
  if (fluctuation >= static_cast<double>(kMediumFluctuation)) return FluctuationGroup::kMedium;
  return FluctuationGroup::kStable;
}

namespace detail {

// Exact test of sigma / mu >= k for integer k > 0, as
// n * sum(d^2) - sum(d)^2 >= k^2 * sum(d)^2.
inline bool fluctuation_at_least(std::span<const Count> values, Count k) {
  __int128 sum = 0, squares = 0;
  for (Count d : values) {
    sum += d;
    squares += static_cast<__int128>(d) * d;
  }
  if (sum == 0) return false;
  const auto n = static_cast<__int128>(values.size());
  return n * squares - sum * sum >= static_cast<__int128>(k) * k * sum * sum;
}

}  // namespace detail

// Population statistics over the whole trace. An all-zero trace is stable
// with fluctuation 0. The group is decided in exact integer arithmetic so
// traces sitting on a threshold land on its closed side.
inline TraceStats classify(const DemandTrace& trace) {
  const auto values = trace.values();
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (Count d : values) mean += static_cast<double>(d);
  mean /= n;
  double var = 0.0;
  for (Count d : values) var += (static_cast<double>(d) - mean) * (static_cast<double>(d) - mean);
  var /= n;

  TraceStats stats;
  stats.mean = mean;
  stats.std_dev = std::sqrt(var);
  stats.fluctuation = mean > 0.0 ? stats.std_dev / mean : 0.0;
  stats.group = detail::fluctuation_at_least(values, kHighFluctuation)     ? FluctuationGroup::kHigh
                : detail::fluctuation_at_least(values, kMediumFluctuation) ? FluctuationGroup::kMedium
                                                                           : FluctuationGroup::kStable;
  return stats;
}

}  // namespace resv
