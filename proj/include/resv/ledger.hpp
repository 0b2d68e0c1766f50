#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "resv/demand_trace.hpp"

namespace resv {

// Per-slot reservation counters x_i of the threshold policies.
//
// A reservation made at slot t raises x_i on [t, t + period - 1] (the slots it
// actually covers) and, as a phantom, on a range of earlier slots. Phantoms
// mark on-demand spending that has already been compensated, so it is not
// counted again. Counters only grow. The ledger also tracks the actual
// coverage alone, which lets callers check that no phantom ever lands on the
// current or a future slot.
class ReservationLedger {
 public:
  explicit ReservationLedger(std::int64_t period) : period_(period), origin_(1 - period) {
    if (period < 1) throw std::invalid_argument("reservation period must be at least one slot");
  }

  std::int64_t period() const noexcept { return period_; }

  // x_i, actual plus phantom reservations.
  Count at(Slot i) const noexcept { return lookup(counters_, i); }

  // Reservations made so far that are active at slot i.
  Count actual(Slot i) const noexcept { return lookup(actual_, i); }

  // Records one reservation bought at t, with phantoms on [phantom_from, t - 1].
  void reserve(Slot t, Slot phantom_from) {
    for (Slot i = t; i < t + period_; ++i) {
      ++slot_ref(counters_, i);
      ++slot_ref(actual_, i);
    }
    for (Slot i = phantom_from; i < t; ++i) ++slot_ref(counters_, i);
  }

 private:
  Count lookup(const std::vector<Count>& v, Slot i) const noexcept {
    if (i < origin_) return 0;
    const auto k = static_cast<std::size_t>(i - origin_);
    return k < v.size() ? v[k] : 0;
  }

  Count& slot_ref(std::vector<Count>& v, Slot i) {
    if (i < origin_) throw std::out_of_range("ledger slot precedes the first reservable window");
    const auto k = static_cast<std::size_t>(i - origin_);
    if (k >= v.size()) v.resize(k + 1 + static_cast<std::size_t>(period_), 0);
    return v[k];
  }

  std::int64_t period_;
  Slot origin_;
  std::vector<Count> counters_;
  std::vector<Count> actual_;
};

}  // namespace resv
