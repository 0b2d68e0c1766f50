#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "resv/demand_trace.hpp"
#include "resv/error.hpp"

namespace resv {

// Comparison tolerance for accumulated money values.
inline constexpr double kCostTolerance = 1e-9;

// Prices normalized so that one reservation fee is 1.
//
// An on-demand instance costs `on_demand_rate` per slot. A reserved instance
// costs the fee up front, stays active for `period` slots starting with the
// slot it was bought in, and each slot it is used costs
// `discount * on_demand_rate`.
class PricingModel {
 public:
  PricingModel(double on_demand_rate, double discount, std::int64_t period)
      : rate_(on_demand_rate), discount_(discount), period_(period) {
    if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw std::invalid_argument("on-demand rate must be positive");
    if (!(discount_ >= 0.0 && discount_ <= 1.0)) throw std::invalid_argument("discount must lie in [0, 1]");
    if (period_ < 1) throw std::invalid_argument("reservation period must be at least one slot");
  }

  // Normalizes raw dollar prices: rate = on-demand / fee, discount = reserved / on-demand.
  static PricingModel from_dollars(double on_demand_hourly, double reservation_fee, double reserved_hourly,
                                   std::int64_t period) {
    if (!(reservation_fee > 0.0)) throw std::invalid_argument("reservation fee must be positive");
    if (!(on_demand_hourly > 0.0)) throw std::invalid_argument("on-demand price must be positive");
    return PricingModel(on_demand_hourly / reservation_fee, reserved_hourly / on_demand_hourly, period);
  }

  double rate() const noexcept { return rate_; }
  double discount() const noexcept { return discount_; }
  std::int64_t period() const noexcept { return period_; }

  friend bool operator==(const PricingModel&, const PricingModel&) = default;

 private:
  double rate_;
  double discount_;
  std::int64_t period_;
};

// On-demand spend over one period at which reserving breaks even: 1 / (1 - discount).
// Empty when the discount is 1, where no amount of usage justifies a reservation.
inline std::optional<double> break_even(const PricingModel& pricing) {
  if (pricing.discount() >= 1.0) return std::nullopt;
  return 1.0 / (1.0 - pricing.discount());
}

// Policies compare against this; +inf makes every threshold test fail.
inline double break_even_or_infinity(const PricingModel& pricing) {
  return break_even(pricing).value_or(std::numeric_limits<double>::infinity());
}

inline double deterministic_bound(double discount) { return 2.0 - discount; }

inline double randomized_bound(double discount) {
  const double e = std::exp(1.0);
  return e / (e - 1.0 + discount);
}

// r_t new reservations and o_t on-demand launches per slot.
struct PurchaseSchedule {
  std::vector<Count> reservations;
  std::vector<Count> on_demand;
  // Set by randomized policies: the sampled threshold and the seed that produced it.
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;

  PurchaseSchedule() = default;
  explicit PurchaseSchedule(std::size_t slots) : reservations(slots, 0), on_demand(slots, 0) {}
  PurchaseSchedule(std::vector<Count> r, std::vector<Count> o) : reservations(std::move(r)), on_demand(std::move(o)) {}

  std::size_t size() const noexcept { return reservations.size(); }

  Count num_reservations() const noexcept {
    Count n = 0;
    for (Count r : reservations) n += r;
    return n;
  }

  friend bool operator==(const PurchaseSchedule&, const PurchaseSchedule&) = default;
};

struct CostReport {
  double total = 0.0;
  double on_demand_cost = 0.0;
  double reservation_fees = 0.0;
  double reserved_usage_cost = 0.0;
  Count num_reservations = 0;
  std::optional<double> normalized_to_on_demand;

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

struct Feasibility {
  bool feasible = true;
  std::optional<std::size_t> first_violation;  // 1-based slot

  explicit operator bool() const noexcept { return feasible; }
};

// Reservations active at each slot: sum of r_i over i in [t - period + 1, t].
inline std::vector<Count> active_reservations(std::span<const Count> reservations, std::int64_t period) {
  std::vector<Count> active(reservations.size(), 0);
  Count window = 0;
  for (std::size_t t = 0; t < reservations.size(); ++t) {
    window += reservations[t];
    if (t >= static_cast<std::size_t>(period)) window -= reservations[t - static_cast<std::size_t>(period)];
    active[t] = window;
  }
  return active;
}

inline Feasibility check_feasibility(const DemandTrace& trace, const PurchaseSchedule& schedule,
                                     std::int64_t period) {
  if (schedule.reservations.size() != trace.size() || schedule.on_demand.size() != trace.size()) {
    throw std::invalid_argument("schedule length does not match trace length");
  }
  if (period < 1) throw std::invalid_argument("reservation period must be at least one slot");
  const auto active = active_reservations(schedule.reservations, period);
  const auto demand = trace.values();
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (schedule.reservations[t] < 0 || schedule.on_demand[t] < 0 ||
        schedule.on_demand[t] + active[t] < demand[t]) {
      return Feasibility{false, t + 1};
    }
  }
  return Feasibility{};
}

// Exact cost of a feasible schedule, split into its three components.
// Reserved usage is charged on (d_t - o_t)^+: launching more on-demand
// instances than demanded never earns a credit.
inline CostReport evaluate_cost(const DemandTrace& trace, const PurchaseSchedule& schedule,
                                const PricingModel& pricing) {
  const auto feasibility = check_feasibility(trace, schedule, pricing.period());
  if (!feasibility) throw InfeasibleSchedule(*feasibility.first_violation);

  const double p = pricing.rate();
  const double alpha = pricing.discount();
  const auto demand = trace.values();
  CostReport report;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const Count o = schedule.on_demand[t];
    const Count reserved_used = demand[t] > o ? demand[t] - o : 0;
    report.on_demand_cost += static_cast<double>(o) * p;
    report.reservation_fees += static_cast<double>(schedule.reservations[t]);
    report.reserved_usage_cost += alpha * p * static_cast<double>(reserved_used);
    report.num_reservations += schedule.reservations[t];
  }
  report.total = report.on_demand_cost + report.reservation_fees + report.reserved_usage_cost;
  return report;
}

// Cost of serving every unit on demand, p * sum(d_t).
inline double all_on_demand_cost(const DemandTrace& trace, const PricingModel& pricing) {
  return pricing.rate() * static_cast<double>(trace.total());
}

}  // namespace resv
