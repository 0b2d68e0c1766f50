#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace resv {

// Seeded generator with draws that are identical across standard libraries.
// std::mt19937_64's output sequence is fixed by the standard; the
// distributions in <random> are not, so we derive variates by hand.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Number of trials up to and including the first success, success probability q in (0, 1].
  std::int64_t geometric(double q) {
    if (q >= 1.0) return 1;
    const double u = 1.0 - uniform();  // (0, 1]
    return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-q)));
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace resv
