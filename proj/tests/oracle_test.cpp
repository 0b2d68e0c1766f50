#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "resv/oracle.hpp"
#include "support/corpus.hpp"
#include "support/reference.hpp"

namespace resv {
namespace {

std::vector<Count> values(const DemandTrace& trace) { return {trace.values().begin(), trace.values().end()}; }

testing::CorpusShape reservation_heavy() {
  testing::CorpusShape shape;
  shape.max_length = 7;
  shape.periods = {1, 2, 3, 4};
  shape.max_demand = 2;
  shape.rates = {0.05, 0.2, 0.5, 1.0};
  return shape;
}

TEST(SolveDp, Examples) {
  const auto three = solve_dp(DemandTrace{1, 1, 1}, PricingModel(1.0, 0.5, 3));
  EXPECT_NEAR(three.cost, 2.5, 1e-12);
  EXPECT_EQ(three.schedule.reservations, (std::vector<Count>{1, 0, 0}));
  EXPECT_EQ(solve_dp(DemandTrace{0, 0, 0, 0}, PricingModel(0.3, 0.5, 3)).cost, 0.0);
  EXPECT_NEAR(solve_dp(DemandTrace{1}, PricingModel(0.1, 0.5, 2)).cost, 0.1, 1e-12);
}

TEST(SolveDp, UnitPeriod) {
  // Per slot: d p on demand versus d (1 + a p) reserved.
  const PricingModel pricing(2.5, 0.2, 1);
  const auto s = solve_dp(DemandTrace{1, 0, 3}, pricing);
  EXPECT_NEAR(s.cost, 4.0 * (1.0 + 0.2 * 2.5), 1e-12);
  EXPECT_EQ(s.schedule.reservations, (std::vector<Count>{1, 0, 3}));
  EXPECT_NEAR(solve_dp(DemandTrace{1, 0, 3}, PricingModel(0.5, 0.2, 1)).cost, 2.0, 1e-12);
}

TEST(SolveDp, IntractableBeyondBudget) {
  std::vector<Count> d(500, 40);
  EXPECT_THROW(solve_dp(DemandTrace(d), PricingModel(0.1, 0.5, 50)), Intractable);
  EXPECT_THROW(solve_dp(DemandTrace{3, 3, 3}, PricingModel(0.1, 0.5, 3), DpOptions{10.0}), Intractable);
}

TEST(SolveBruteForce, Examples) {
  EXPECT_NEAR(solve_brute_force(DemandTrace{1, 1, 1}, PricingModel(1.0, 0.5, 3)).cost, 2.5, 1e-12);
  const auto five = solve_brute_force(DemandTrace{5}, PricingModel(0.01, 0.0, 2));
  EXPECT_NEAR(five.cost, 0.05, 1e-12);
  EXPECT_EQ(five.schedule.reservations, (std::vector<Count>{0}));
  const auto empty = solve_brute_force(DemandTrace{0, 0, 0}, PricingModel(0.5, 0.5, 2));
  EXPECT_EQ(empty.cost, 0.0);
  EXPECT_EQ(empty.schedule, PurchaseSchedule(3));
}

TEST(SolveBruteForce, TiesResolveToSmallestScheduleAndReportLargestCount) {
  // p (1 - a) = 1: on demand and reserving cost the same.
  const PricingModel pricing(2.0, 0.5, 1);
  const auto s = solve_brute_force(DemandTrace{1, 1}, pricing);
  EXPECT_NEAR(s.cost, 4.0, 1e-12);
  EXPECT_EQ(s.schedule.reservations, (std::vector<Count>{0, 0}));
  EXPECT_EQ(s.max_reservations_among_optima, 2);
}

TEST(SolveBruteForce, NodeBudget) {
  EXPECT_THROW(solve_brute_force(DemandTrace{2, 2, 2, 2, 2, 2}, PricingModel(0.5, 0.5, 3), {std::nullopt, 50}),
               Intractable);
}

// Three independent optimizers agree: the dynamic program, the pruned search
// and a plain enumeration with a cap one above the peak demand.
TEST(OracleAgreement, DpBruteForceAndUncappedEnumeration) {
  const auto corpus = testing::make_corpus(reservation_heavy(), 77, 600);
  for (const auto& inst : corpus) {
    const auto dp = solve_dp(inst.trace, inst.pricing);
    const auto bf = solve_brute_force(inst.trace, inst.pricing);
    const auto ref = testing::reference_optimum(values(inst.trace), inst.pricing.rate(), inst.pricing.discount(),
                                                inst.pricing.period(), inst.trace.peak() + 1);
    ASSERT_NEAR(dp.cost, bf.cost, 1e-9) << "instance " << inst.id;
    ASSERT_NEAR(dp.cost, ref.cost, 1e-9) << "instance " << inst.id;
    EXPECT_EQ(bf.max_reservations_among_optima, ref.max_reservations) << "instance " << inst.id;
    for (const auto* s : {&dp.schedule, &bf.schedule}) {
      ASSERT_TRUE(check_feasibility(inst.trace, *s, inst.pricing.period()));
      EXPECT_NEAR(evaluate_cost(inst.trace, *s, inst.pricing).total, dp.cost, 1e-9);
    }
  }
}

TEST(OracleAgreement, DpMatchesBruteForceOnLongerTraces) {
  testing::CorpusShape shape;
  shape.max_length = 10;
  shape.periods = {2, 3, 4, 5};
  shape.max_demand = 3;
  shape.rates = {0.05, 0.2, 0.5};
  for (const auto& inst : testing::make_corpus(shape, 78, 400)) {
    ASSERT_NEAR(solve_dp(inst.trace, inst.pricing).cost, solve_brute_force(inst.trace, inst.pricing).cost, 1e-9)
        << "instance " << inst.id;
  }
}

TEST(OracleDominance, NoPolicyBeatsTheOptimum) {
  const auto corpus = testing::make_corpus(reservation_heavy(), 79, 1000);
  for (const auto& inst : corpus) {
    const auto& pr = inst.pricing;
    const double opt = solve_dp(inst.trace, pr).cost;
    for (const auto& s : {run_all_on_demand(inst.trace, pr), run_all_reserved(inst.trace, pr),
                          run_separate(inst.trace, pr), run_deterministic(inst.trace, pr),
                          run_randomized(inst.trace, pr, inst.id)}) {
      EXPECT_GE(evaluate_cost(inst.trace, s, pr).total, opt - 1e-9) << "instance " << inst.id;
    }
  }
}

TEST(CompetitiveRatio, Examples) {
  EXPECT_NEAR(competitive_ratio(3.5, 2.5), 1.4, 1e-12);
  EXPECT_EQ(competitive_ratio(0.0, 0.0), 1.0);
  EXPECT_THROW(competitive_ratio(1.0, 0.0), InvariantViolation);
  EXPECT_THROW(competitive_ratio(1.0, -1.0), std::invalid_argument);
  EXPECT_NEAR(deterministic_bound(0.49), 1.51, 1e-12);
}

TEST(ThresholdBehaviors, PiecesPartitionTheDistribution) {
  const PricingModel pricing(0.3, 0.4, 3);
  const DemandTrace trace{1, 2, 2, 0, 1, 3, 1};
  for (auto window : {std::optional<std::int64_t>{}, std::optional<std::int64_t>{0}, std::optional<std::int64_t>{2}}) {
    const auto pieces = threshold_behaviors(trace, pricing, window);
    double mass = 0.0;
    double edge = 0.0;
    for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
      EXPECT_DOUBLE_EQ(pieces[k].lo, edge);
      edge = pieces[k].hi;
      mass += pieces[k].probability;
    }
    EXPECT_DOUBLE_EQ(edge, *break_even(pricing));
    EXPECT_DOUBLE_EQ(pieces.back().lo, *break_even(pricing));
    EXPECT_NEAR(mass + pieces.back().probability, 1.0, 1e-12);
  }
}

// Within each piece, A_z for any z in it behaves as the piece claims.
TEST(ThresholdBehaviors, ConstantOnEachPiece) {
  const auto corpus = testing::make_corpus(reservation_heavy(), 80, 300);
  SeededRng rng(4);
  for (const auto& inst : corpus) {
    const auto d = values(inst.trace);
    for (std::int64_t w = -1; w < inst.pricing.period(); ++w) {
      const auto window = w < 0 ? std::nullopt : std::optional<std::int64_t>(w);
      for (const auto& piece : threshold_behaviors(inst.trace, inst.pricing, window)) {
        for (int k = 0; k < 3; ++k) {
          const double z = piece.lo == piece.hi ? piece.lo : piece.lo + rng.uniform() * (piece.hi - piece.lo);
          const auto ref = testing::reference_threshold(d, inst.pricing.rate(), inst.pricing.period(), z, w);
          ASSERT_EQ(ref.reservations, piece.schedule.reservations) << "instance " << inst.id << " z " << z;
        }
      }
    }
  }
}

TEST(ExpectedCostExact, ThreeUnitExample) {
  const PricingModel pricing(1.0, 0.5, 3);
  const DemandTrace trace{1, 1, 1};
  const double expected = expected_cost_exact(trace, pricing);
  EXPECT_LE(expected, randomized_bound(0.5) * 2.5 + 1e-9);
  EXPECT_NEAR(randomized_bound(0.5) * 2.5, 3.0634, 1e-4);
  // z in [0, 1): reserve at slot 1 (cost 2.5); [1, 2): at slot 2 (3.0); beta: at slot 3 (3.5).
  const double e = std::exp(1.0);
  const double by_hand = 2.5 * (std::exp(0.5) - 1.0) / (e - 0.5) + 3.0 * (e - std::exp(0.5)) / (e - 0.5) +
                         3.5 * 0.5 / (e - 0.5);
  EXPECT_NEAR(expected, by_hand, 1e-12);
}

TEST(ExpectedCostExact, FullDiscountEqualsDeterministic) {
  const PricingModel pricing(0.5, 1.0, 3);
  const DemandTrace trace{1, 2, 2, 1};
  EXPECT_NEAR(expected_cost_exact(trace, pricing), evaluate_cost(trace, run_deterministic(trace, pricing), pricing).total,
              1e-12);
}

TEST(ExpectedCostExact, MatchesQuadrature) {
  const auto corpus = testing::make_corpus(reservation_heavy(), 81, 150);
  const int steps = 4000;
  for (const auto& inst : corpus) {
    const auto d = values(inst.trace);
    const double a = inst.pricing.discount();
    const double beta = 1.0 / (1.0 - a);
    for (std::int64_t w : {std::int64_t{-1}, inst.pricing.period() - 1}) {
      const auto window = w < 0 ? std::nullopt : std::optional<std::int64_t>(w);
      const auto pieces = threshold_behaviors(inst.trace, inst.pricing, window);
      double lo = pieces.front().cost, hi = lo;
      for (const auto& p : pieces) {
        lo = std::min(lo, p.cost);
        hi = std::max(hi, p.cost);
      }
      // One cell per jump may straddle it; the smooth density adds the usual
      // midpoint error h^2 / 24 * |f''| over [0, beta].
      const double h = beta / steps;
      const double fmax = testing::reference_density(a, beta);
      const double tol = static_cast<double>(pieces.size()) * (hi - lo) * fmax * h +
                         hi * beta * h * h * (1.0 - a) * (1.0 - a) * fmax / 24.0 + 1e-9;
      const double quad =
          testing::reference_expected_cost(d, inst.pricing.rate(), a, inst.pricing.period(), w, steps);
      EXPECT_NEAR(expected_cost_exact(inst.trace, inst.pricing, window), quad, tol) << "instance " << inst.id;
    }
  }
}

TEST(ExpectedCostExact, MonteCarloWithinThreeSigma) {
  const PricingModel pricing(0.2, 0.3, 4);
  const DemandTrace trace{1, 2, 2, 3, 1, 0, 2, 2, 1, 1};
  const int n = 20000;
  double sum = 0.0, squares = 0.0;
  for (int s = 0; s < n; ++s) {
    const double c = evaluate_cost(trace, run_randomized(trace, pricing, 500 + s), pricing).total;
    sum += c;
    squares += c * c;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(0.0, squares / n - mean * mean));
  EXPECT_NEAR(expected_cost_exact(trace, pricing), mean, 3.0 * sd / std::sqrt(double(n)) + 1e-12);
}

}  // namespace
}  // namespace resv
