#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resv/demand_trace.hpp"
#include "resv/error.hpp"
#include "resv/ledger.hpp"
#include "resv/pricing.hpp"
#include "resv/sampler.hpp"

namespace resv {

// kOnline reserves while the trailing window [t - period + 1, t] overspends.
// kWindowed looks at [t + w - period + 1, t + w] and also stops once the
// current slot is covered (x_t >= d_t); it keeps that guard even at w = 0.
enum class ThresholdRule { kOnline, kWindowed };

struct SlotDecision {
  Count reserve = 0;
  Count on_demand = 0;
};

// Lazy threshold policy A_z, one slot at a time.
//
// At slot t it counts the slots i in its window whose demand exceeds x_i. While
// rate * count > threshold it buys a reservation, which raises x over the whole
// window (actual coverage from t on, phantoms before t). Whatever x_t leaves
// uncovered runs on demand.
class ThresholdPolicy {
 public:
  ThresholdPolicy(const PricingModel& pricing, double threshold, std::int64_t window = 0,
                  ThresholdRule rule = ThresholdRule::kOnline)
      : rate_(pricing.rate()), threshold_(threshold), period_(pricing.period()), window_(window), rule_(rule),
        ledger_(pricing.period()) {
    if (std::isnan(threshold) || threshold < 0.0) throw std::invalid_argument("threshold must be non-negative");
    if (window < 0 || window >= period_) throw std::invalid_argument("prediction window must satisfy 0 <= w < period");
    if (rule == ThresholdRule::kOnline && window != 0) throw std::invalid_argument("online rule has no prediction window");
  }

  Slot next_slot() const noexcept { return next_; }
  const ReservationLedger& ledger() const noexcept { return ledger_; }

  // Decides slot t = next_slot(). `demand_at(i)` is queried only for
  // i in [t, t + window] and must return 0 beyond the end of the trace.
  template <class DemandAt>
  SlotDecision step(DemandAt&& demand_at) {
    const Slot t = next_;
    const Slot last = t + window_;
    for (Slot i = static_cast<Slot>(demands_.size()) + 1; i <= last; ++i) {
      const Count d = demand_at(i);
      if (d < 0) throw std::invalid_argument("demand must be non-negative");
      demands_.push_back(d);
      count_ += over(i);
    }
    // Slot that left the window since the previous step.
    if (t > 1) count_ -= over(last - period_);

    SlotDecision decision;
    const Slot phantom_from = last - period_ + 1;
    while (rate_ * static_cast<double>(count_) > threshold_ &&
           (rule_ == ThresholdRule::kOnline || ledger_.at(t) < demand(t))) {
      ++decision.reserve;
      ledger_.reserve(t, phantom_from);
      count_ = 0;
      for (Slot i = phantom_from; i <= last; ++i) count_ += over(i);
    }

    if (ledger_.at(t) != ledger_.actual(t)) {
      throw InvariantViolation("phantom reservation reached slot " + std::to_string(t));
    }
    const Count covered = ledger_.at(t);
    decision.on_demand = demand(t) > covered ? demand(t) - covered : 0;
    ++next_;
    return decision;
  }

 private:
  Count demand(Slot i) const noexcept {
    return (i >= 1 && i <= static_cast<Slot>(demands_.size())) ? demands_[static_cast<std::size_t>(i - 1)] : 0;
  }
  Count over(Slot i) const noexcept { return demand(i) > ledger_.at(i) ? 1 : 0; }

  double rate_;
  double threshold_;
  std::int64_t period_;
  std::int64_t window_;
  ThresholdRule rule_;
  ReservationLedger ledger_;
  std::vector<Count> demands_;
  Count count_ = 0;
  Slot next_ = 1;
};

namespace detail {

inline PurchaseSchedule run_threshold_policy(const DemandTrace& trace, ThresholdPolicy policy) {
  PurchaseSchedule schedule(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto decision = policy.step([&](Slot i) { return trace.at(i); });
    schedule.reservations[k] = decision.reserve;
    schedule.on_demand[k] = decision.on_demand;
  }
  return schedule;
}

}  // namespace detail

// A_z. With z = break_even(pricing) this is the deterministic online algorithm.
inline PurchaseSchedule run_threshold(const DemandTrace& trace, const PricingModel& pricing, double z) {
  return detail::run_threshold_policy(trace, ThresholdPolicy(pricing, z));
}

// A_z^w: threshold policy that sees demand w slots ahead (zero past the trace end).
inline PurchaseSchedule run_threshold_windowed(const DemandTrace& trace, const PricingModel& pricing, double z,
                                               std::int64_t window) {
  return detail::run_threshold_policy(trace, ThresholdPolicy(pricing, z, window, ThresholdRule::kWindowed));
}

inline PurchaseSchedule run_deterministic(const DemandTrace& trace, const PricingModel& pricing) {
  return run_threshold(trace, pricing, break_even_or_infinity(pricing));
}

inline PurchaseSchedule run_randomized(const DemandTrace& trace, const PricingModel& pricing, std::uint64_t seed) {
  const double z = sample_threshold(pricing, seed);
  auto schedule = run_threshold(trace, pricing, z);
  schedule.threshold = z;
  schedule.seed = seed;
  return schedule;
}

inline PurchaseSchedule run_randomized_windowed(const DemandTrace& trace, const PricingModel& pricing,
                                                std::int64_t window, std::uint64_t seed) {
  const double z = sample_threshold(pricing, seed);
  auto schedule = run_threshold_windowed(trace, pricing, z, window);
  schedule.threshold = z;
  schedule.seed = seed;
  return schedule;
}

inline PurchaseSchedule run_all_on_demand(const DemandTrace& trace, const PricingModel&) {
  PurchaseSchedule schedule(trace.size());
  const auto d = trace.values();
  schedule.on_demand.assign(d.begin(), d.end());
  return schedule;
}

// Tops up reservations so that active reservations always cover demand.
inline PurchaseSchedule run_all_reserved(const DemandTrace& trace, const PricingModel& pricing) {
  PurchaseSchedule schedule(trace.size());
  const auto d = trace.values();
  const auto period = static_cast<std::size_t>(pricing.period());
  Count active = 0;
  for (std::size_t t = 0; t < d.size(); ++t) {
    if (t >= period) active -= schedule.reservations[t - period];
    if (d[t] > active) {
      schedule.reservations[t] = d[t] - active;
      active = d[t];
    }
  }
  return schedule;
}

// Bahncard decomposition: demand level k becomes its own single-instance user
// with trace I(d_t >= k). Each level runs A_beta on its own ledger, so a
// reservation bought for one level never serves another.
inline PurchaseSchedule run_separate(const DemandTrace& trace, const PricingModel& pricing) {
  PurchaseSchedule total(trace.size());
  const auto d = trace.values();
  for (Count level = 1; level <= trace.peak(); ++level) {
    std::vector<Count> unit(d.size());
    for (std::size_t t = 0; t < d.size(); ++t) unit[t] = d[t] >= level ? 1 : 0;
    const auto part = run_deterministic(DemandTrace(std::move(unit)), pricing);
    for (std::size_t t = 0; t < d.size(); ++t) {
      total.reservations[t] += part.reservations[t];
      total.on_demand[t] += part.on_demand[t];
    }
  }
  return total;
}

enum class PolicyKind { kAllOnDemand, kAllReserved, kSeparate, kDeterministic, kRandomized };

inline std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kAllOnDemand: return "all-on-demand";
    case PolicyKind::kAllReserved: return "all-reserved";
    case PolicyKind::kSeparate: return "separate";
    case PolicyKind::kDeterministic: return "deterministic";
    case PolicyKind::kRandomized: return "randomized";
  }
  return "?";
}

inline std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  for (auto k : {PolicyKind::kAllOnDemand, PolicyKind::kAllReserved, PolicyKind::kSeparate,
                 PolicyKind::kDeterministic, PolicyKind::kRandomized}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

struct PolicyConfig {
  std::optional<double> threshold;  // deterministic only; defaults to break-even
  std::int64_t window = 0;          // > 0 selects the prediction-window variants
  std::uint64_t seed = 0;           // randomized only

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

inline void validate(const PolicyConfig& config, const PricingModel& pricing) {
  if (config.window < 0 || config.window >= pricing.period()) {
    throw std::invalid_argument("prediction window must satisfy 0 <= w < period");
  }
  if (config.threshold) {
    const double z = *config.threshold;
    if (std::isnan(z) || z < 0.0 || z > break_even_or_infinity(pricing)) {
      throw std::invalid_argument("threshold must lie in [0, break-even]");
    }
  }
}

inline PurchaseSchedule run_policy(PolicyKind kind, const PolicyConfig& config, const DemandTrace& trace,
                                   const PricingModel& pricing) {
  validate(config, pricing);
  switch (kind) {
    case PolicyKind::kAllOnDemand: return run_all_on_demand(trace, pricing);
    case PolicyKind::kAllReserved: return run_all_reserved(trace, pricing);
    case PolicyKind::kSeparate: return run_separate(trace, pricing);
    case PolicyKind::kDeterministic: {
      const double z = config.threshold.value_or(break_even_or_infinity(pricing));
      return config.window > 0 ? run_threshold_windowed(trace, pricing, z, config.window)
                               : run_threshold(trace, pricing, z);
    }
    case PolicyKind::kRandomized:
      return config.window > 0 ? run_randomized_windowed(trace, pricing, config.window, config.seed)
                               : run_randomized(trace, pricing, config.seed);
  }
  throw std::invalid_argument("unknown policy");
}

}  // namespace resv
