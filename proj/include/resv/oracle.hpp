#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "resv/demand_trace.hpp"
#include "resv/error.hpp"
#include "resv/policies.hpp"
#include "resv/pricing.hpp"
#include "resv/sampler.hpp"

namespace resv {

struct OracleSolution {
  double cost = 0.0;
  PurchaseSchedule schedule;
};

struct DpOptions {
  // Upper bound on (number of states) x (trace length).
  double state_budget = 2.0e7;
};

namespace detail {

// C(n, k) in floating point, enough to compare against a budget.
inline double binomial(double n, double k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

inline void enumerate_non_increasing(std::size_t length, Count bound, std::vector<Count>& prefix,
                                     std::vector<std::vector<Count>>& out) {
  if (prefix.size() == length) {
    out.push_back(prefix);
    return;
  }
  const Count cap = prefix.empty() ? bound : prefix.back();
  for (Count v = 0; v <= cap; ++v) {
    prefix.push_back(v);
    enumerate_non_increasing(length, bound, prefix, out);
    prefix.pop_back();
  }
}

inline double slot_cost(Count demand, Count reserved, Count on_demand, double p, double alpha) {
  return static_cast<double>(on_demand) * p + static_cast<double>(reserved) +
         alpha * p * static_cast<double>(demand - on_demand);
}

}  // namespace detail

// Minimum-cost schedule by dynamic programming over reservation states.
//
// The state after slot t is s = (s_1, ..., s_{period-1}), where s_i counts the
// reservations bought up to t that are still active at t + i. Buying r at slot
// t+1 maps s to (s_2 + r, ..., s_{period-1} + r, r) and leaves s_1 + r
// reservations to serve d_{t+1}.
//
// Entries are capped at the peak demand D. Some optimum never has more than D
// reservations active at once: if more are active at slot t, the one bought
// last can be moved to t + 1 (or dropped past the trace end). Every slot it
// stops covering still has at least D other active reservations, so the cost
// does not rise. The search starts from the empty state; a reservation held
// before slot 1 is never better than buying it at slot 1.
inline OracleSolution solve_dp(const DemandTrace& trace, const PricingModel& pricing, const DpOptions& options = {}) {
  const auto d = trace.values();
  const double p = pricing.rate();
  const double alpha = pricing.discount();
  const Count peak = trace.peak();
  const std::size_t horizon = trace.size();

  if (pricing.period() == 1) {
    // A reservation covers only its own slot: per unit, pay min(p, 1 + alpha p).
    const bool reserve = 1.0 + alpha * p < p;
    OracleSolution solution{0.0, PurchaseSchedule(horizon)};
    for (std::size_t t = 0; t < horizon; ++t) {
      (reserve ? solution.schedule.reservations : solution.schedule.on_demand)[t] = d[t];
      solution.cost += reserve ? detail::slot_cost(d[t], d[t], 0, p, alpha) : detail::slot_cost(d[t], 0, d[t], p, alpha);
    }
    return solution;
  }

  const auto dims = static_cast<std::size_t>(pricing.period() - 1);
  const double states_estimate = detail::binomial(static_cast<double>(peak) + static_cast<double>(dims),
                                                  static_cast<double>(dims));
  if (states_estimate * static_cast<double>(horizon) > options.state_budget) {
    std::ostringstream msg;
    msg << "dynamic program needs ~" << std::setprecision(3) << states_estimate << " states per slot over "
        << horizon << " slots";
    throw Intractable(msg.str());
  }

  std::vector<std::vector<Count>> states;
  {
    std::vector<Count> prefix;
    detail::enumerate_non_increasing(dims, peak, prefix, states);
  }
  std::map<std::vector<Count>, std::size_t> index;
  for (std::size_t k = 0; k < states.size(); ++k) index.emplace(states[k], k);

  struct Move {
    Count reserve;
    std::size_t next;
  };
  std::vector<std::vector<Move>> moves(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    const Count carried = dims >= 2 ? s[1] : 0;
    for (Count r = 0; carried + r <= peak; ++r) {
      std::vector<Count> next(dims);
      for (std::size_t i = 0; i + 1 < dims; ++i) next[i] = s[i + 1] + r;
      next[dims - 1] = r;
      moves[k].push_back({r, index.at(next)});
    }
  }

  constexpr double kUnreached = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> value(states.size(), kUnreached);
  value[index.at(std::vector<Count>(dims, 0))] = 0.0;
  std::vector<std::vector<std::size_t>> parent(horizon, std::vector<std::size_t>(states.size(), kNone));
  std::vector<std::vector<Count>> bought(horizon, std::vector<Count>(states.size(), 0));

  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<double> next_value(states.size(), kUnreached);
    for (std::size_t k = 0; k < states.size(); ++k) {
      if (value[k] == kUnreached) continue;
      const Count held = states[k][0];
      for (const Move& m : moves[k]) {
        const Count reserved = held + m.reserve;
        const Count o = d[t] > reserved ? d[t] - reserved : 0;
        const double v = value[k] + detail::slot_cost(d[t], m.reserve, o, p, alpha);
        if (v < next_value[m.next]) {
          next_value[m.next] = v;
          parent[t][m.next] = k;
          bought[t][m.next] = m.reserve;
        }
      }
    }
    value = std::move(next_value);
  }

  const auto best = static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin());
  OracleSolution solution{value[best], PurchaseSchedule(horizon)};
  std::size_t state = best;
  for (std::size_t t = horizon; t-- > 0;) {
    solution.schedule.reservations[t] = bought[t][state];
    state = parent[t][state];
  }
  const auto active = active_reservations(solution.schedule.reservations, pricing.period());
  for (std::size_t t = 0; t < horizon; ++t) solution.schedule.on_demand[t] = d[t] > active[t] ? d[t] - active[t] : 0;
  return solution;
}

struct BruteForceOptions {
  std::optional<Count> r_cap;  // per-slot reservation cap; defaults to peak demand
  std::uint64_t node_budget = 200'000'000;
};

struct BruteForceSolution {
  double cost = 0.0;
  PurchaseSchedule schedule;                // lexicographically smallest optimal r
  Count max_reservations_among_optima = 0;  // over schedules within kCostTolerance of the optimum
  std::uint64_t nodes = 0;
};

// Exhaustive search over r in [0, r_cap]^T. Given r, o_t = (d_t - active_t)^+
// is optimal, since on-demand capacity carries nothing between slots. Branches
// whose partial cost already exceeds the best total are cut; costs are
// non-negative, so this never loses an optimum or a tie. The budget counts
// visited search nodes.
inline BruteForceSolution solve_brute_force(const DemandTrace& trace, const PricingModel& pricing,
                                            const BruteForceOptions& options = {}) {
  const auto d = trace.values();
  const double p = pricing.rate();
  const double alpha = pricing.discount();
  const auto period = static_cast<std::size_t>(pricing.period());
  const std::size_t horizon = trace.size();
  const Count cap = options.r_cap.value_or(trace.peak());
  if (cap < 0) throw std::invalid_argument("reservation cap must be non-negative");

  BruteForceSolution result;
  result.cost = std::numeric_limits<double>::infinity();
  std::vector<Count> r(horizon, 0);

  auto search = [&](auto&& self, std::size_t t, Count in_window, double partial, Count reservations) -> void {
    if (++result.nodes > options.node_budget) {
      throw Intractable("brute-force search exceeded " + std::to_string(options.node_budget) + " nodes");
    }
    if (partial > result.cost + kCostTolerance) return;
    if (t == horizon) {
      if (partial < result.cost - kCostTolerance) {
        result.cost = partial;
        result.schedule.reservations = r;
        result.max_reservations_among_optima = reservations;
      } else {
        result.max_reservations_among_optima = std::max(result.max_reservations_among_optima, reservations);
      }
      return;
    }
    const Count expiring = t >= period ? r[t - period] : 0;
    for (Count k = 0; k <= cap; ++k) {
      r[t] = k;
      const Count active = in_window - expiring + k;
      const Count o = d[t] > active ? d[t] - active : 0;
      self(self, t + 1, active, partial + detail::slot_cost(d[t], k, o, p, alpha), reservations + k);
    }
    r[t] = 0;
  };
  search(search, 0, 0, 0.0, 0);

  const auto active = active_reservations(result.schedule.reservations, pricing.period());
  result.schedule.on_demand.resize(horizon);
  for (std::size_t t = 0; t < horizon; ++t) result.schedule.on_demand[t] = d[t] > active[t] ? d[t] - active[t] : 0;
  return result;
}

// Policy cost over optimal cost; 1 when both are zero.
inline double competitive_ratio(double policy_cost, double oracle_cost) {
  if (oracle_cost < 0.0) throw std::invalid_argument("oracle cost must be non-negative");
  if (oracle_cost == 0.0) {
    if (policy_cost <= kCostTolerance) return 1.0;
    throw InvariantViolation("positive policy cost against a zero optimum");
  }
  return policy_cost / oracle_cost;
}

// One piece of the threshold distribution on which A_z acts identically.
struct ThresholdBehavior {
  double lo = 0.0;  // z range [lo, hi); lo == hi marks the atom at beta
  double hi = 0.0;
  double probability = 0.0;
  PurchaseSchedule schedule;
  double cost = 0.0;
};

// Splits [0, beta] into the pieces where A_z (or A_z^w) cannot change.
//
// The policy branches only on rate * count > z, with integer count, so its
// run is fixed for z in [k p, (k + 1) p). Counts never exceed min(period, T),
// so every z from that multiple of p upward behaves as "never reserve".
inline std::vector<ThresholdBehavior> threshold_behaviors(const DemandTrace& trace, const PricingModel& pricing,
                                                          std::optional<std::int64_t> window = std::nullopt) {
  auto run = [&](double z) {
    return window ? run_threshold_windowed(trace, pricing, z, *window) : run_threshold(trace, pricing, z);
  };
  auto piece = [&](double lo, double hi, double probability, double z) {
    ThresholdBehavior b{lo, hi, probability, run(z), 0.0};
    b.cost = evaluate_cost(trace, b.schedule, pricing).total;
    return b;
  };

  std::vector<ThresholdBehavior> pieces;
  const auto beta = break_even(pricing);
  if (!beta) {
    const double inf = std::numeric_limits<double>::infinity();
    pieces.push_back(piece(inf, inf, 1.0, inf));
    return pieces;
  }

  const double p = pricing.rate();
  const auto max_count = std::min<std::int64_t>(pricing.period(), trace.length());
  for (std::int64_t k = 0;; ++k) {
    const double lo = static_cast<double>(k) * p;
    if (!(lo < *beta)) break;
    if (k >= max_count) {
      pieces.push_back(piece(lo, *beta, threshold_mass(pricing, lo, *beta), lo));
      break;
    }
    const double hi = std::min(static_cast<double>(k + 1) * p, *beta);
    pieces.push_back(piece(lo, hi, threshold_mass(pricing, lo, hi), lo));
  }
  pieces.push_back(piece(*beta, *beta, atom_probability(pricing), *beta));
  return pieces;
}

// E[C] of the randomized policy under the threshold distribution, integrated
// exactly over the pieces of threshold_behaviors.
inline double expected_cost_exact(const DemandTrace& trace, const PricingModel& pricing,
                                  std::optional<std::int64_t> window = std::nullopt) {
  double expected = 0.0;
  for (const auto& b : threshold_behaviors(trace, pricing, window)) expected += b.probability * b.cost;
  return expected;
}

}  // namespace resv
