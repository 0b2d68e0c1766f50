#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace resv {

// Instance counts (demand, reservations, launches) are exact integers.
using Count = std::int64_t;

// 1-based time slots; may run outside [1, T] for lookback and lookahead.
using Slot = std::int64_t;

// Per-slot instance demand d_1..d_T.
class DemandTrace {
 public:
  explicit DemandTrace(std::vector<Count> demands) : demands_(std::move(demands)) {
    if (demands_.empty()) throw std::invalid_argument("demand trace must have at least one slot");
    for (Count d : demands_) {
      if (d < 0) throw std::invalid_argument("demand must be non-negative");
    }
  }
  DemandTrace(std::initializer_list<Count> demands) : DemandTrace(std::vector<Count>(demands)) {}

  std::size_t size() const noexcept { return demands_.size(); }
  Slot length() const noexcept { return static_cast<Slot>(demands_.size()); }

  // Demand at 1-based slot t; zero outside the trace.
  Count at(Slot t) const noexcept {
    return (t >= 1 && t <= length()) ? demands_[static_cast<std::size_t>(t - 1)] : 0;
  }

  std::span<const Count> values() const noexcept { return demands_; }

  Count peak() const noexcept {
    Count m = 0;
    for (Count d : demands_) m = d > m ? d : m;
    return m;
  }

  Count total() const noexcept { return std::accumulate(demands_.begin(), demands_.end(), Count{0}); }

  friend bool operator==(const DemandTrace&, const DemandTrace&) = default;

 private:
  std::vector<Count> demands_;
};

}  // namespace resv
