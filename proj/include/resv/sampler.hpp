#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "resv/error.hpp"
#include "resv/pricing.hpp"
#include "resv/random.hpp"

namespace resv {

// Threshold distribution of the randomized policy. On [0, beta) it has density
// (1 - a) e^{(1 - a) z} / (e - 1 + a); the remaining mass a / (e - 1 + a) sits
// on z = beta. All functions throw NoReservationRegime at discount 1.

inline double atom_probability(const PricingModel& pricing) {
  if (pricing.discount() >= 1.0) throw NoReservationRegime();
  const double a = pricing.discount();
  return a / (std::numbers::e - 1.0 + a);
}

// Mass of the continuous part on [0, z]; z is clamped to [0, beta].
inline double threshold_cdf(const PricingModel& pricing, double z) {
  if (pricing.discount() >= 1.0) throw NoReservationRegime();
  const double a = pricing.discount();
  const double beta = 1.0 / (1.0 - a);
  z = std::clamp(z, 0.0, beta);
  return std::expm1((1.0 - a) * z) / (std::numbers::e - 1.0 + a);
}

// Continuous mass on [lo, hi) for 0 <= lo <= hi <= beta.
inline double threshold_mass(const PricingModel& pricing, double lo, double hi) {
  return threshold_cdf(pricing, hi) - threshold_cdf(pricing, lo);
}

// Inverse CDF of the mixed distribution at u in [0, 1). Values of u below the
// continuous mass (e - 1) / (e - 1 + a) invert F(z) = (e^{(1-a) z} - 1) / (e - 1 + a);
// the rest map to the atom.
inline double threshold_from_uniform(const PricingModel& pricing, double u) {
  if (pricing.discount() >= 1.0) throw NoReservationRegime();
  const double a = pricing.discount();
  const double beta = 1.0 / (1.0 - a);
  const double norm = std::numbers::e - 1.0 + a;
  if (u >= (std::numbers::e - 1.0) / norm) return beta;
  return std::min(std::log1p(u * norm) / (1.0 - a), std::nextafter(beta, 0.0));
}

inline double sample_threshold(const PricingModel& pricing, std::uint64_t seed) {
  SeededRng rng(seed);
  return threshold_from_uniform(pricing, rng.uniform());
}

}  // namespace resv
