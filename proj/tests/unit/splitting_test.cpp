#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gsrisk/cmcs.hpp"
#include "gsrisk/errors.hpp"
#include "gsrisk/oracle.hpp"
#include "gsrisk/splitting.hpp"
#include "support/test_support.hpp"

namespace gsrisk {
namespace {

using testing::tiny_model;

std::size_t sum(const std::vector<std::size_t>& v) { return std::accumulate(v.begin(), v.end(), std::size_t{0}); }

TEST(SplittingPlanTest, Examples) {
  Rng rng = make_stream(1, 0);
  auto p = splitting_plan(10, 3, rng).chain_lengths;
  std::sort(p.begin(), p.end(), std::greater<>());
  EXPECT_EQ(p, (std::vector<std::size_t>{4, 3, 3}));
  EXPECT_EQ(splitting_plan(12, 4, rng).chain_lengths, (std::vector<std::size_t>{3, 3, 3, 3}));
  EXPECT_EQ(splitting_plan(5, 5, rng).chain_lengths, (std::vector<std::size_t>{1, 1, 1, 1, 1}));
  EXPECT_EQ(splitting_plan(7, 1, rng).chain_lengths, (std::vector<std::size_t>{7}));
}

TEST(SplittingPlanTest, InvalidEntrants) {
  Rng rng = make_stream(1, 0);
  EXPECT_THROW(splitting_plan(10, 0, rng), ContractError);
  EXPECT_THROW(splitting_plan(10, 11, rng), ContractError);
}

TEST(SplittingPlanTest, Properties) {
  Rng rng = make_stream(2, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform_int(rng, 0, 999));
    const std::size_t k = 1 + static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
    const auto lengths = splitting_plan(n, k, rng).chain_lengths;
    ASSERT_EQ(lengths.size(), k);
    EXPECT_EQ(sum(lengths), n);
    const std::size_t extra = static_cast<std::size_t>(
        std::count(lengths.begin(), lengths.end(), n / k + 1));
    EXPECT_EQ(extra, n % k);
    for (std::size_t len : lengths) EXPECT_TRUE(len == n / k || len == n / k + 1);
  }
}

TEST(SplittingPlanTest, ExtraStepsSpreadUniformly) {
  Rng rng = make_stream(3, 0);
  std::vector<double> hits(4, 0.0);
  for (int trial = 0; trial < 40'000; ++trial) {
    const auto lengths = splitting_plan(9, 4, rng).chain_lengths;
    for (std::size_t i = 0; i < 4; ++i)
      if (lengths[i] == 3) hits[i] += 1.0;
  }
  EXPECT_TRUE(testing::chi_square(hits, {0.25, 0.25, 0.25, 0.25}).passes(0.01));
}

TEST(LevelScheduleTest, Validation) {
  EXPECT_THROW(LevelSchedule{}.validate(200.0), ContractError);
  EXPECT_THROW((LevelSchedule{{100.0, 100.0}}.validate(200.0)), ContractError);
  EXPECT_THROW((LevelSchedule{{100.0, 150.0}}.validate(200.0)), ContractError);
  EXPECT_THROW((LevelSchedule{{200.0, 100.0}}.validate(200.0)), ContractError);
  EXPECT_NO_THROW((LevelSchedule{{150.0, 100.0}}.validate(200.0)));
  EXPECT_NO_THROW((LevelSchedule{{200.0}}.validate(200.0)));
}

TEST(AdamTest, ProbableEventIsSingleLevel) {
  const SystemModel tiny = tiny_model();
  Rng rng = make_stream(4, streams::kAdamPilot);
  const auto r = adam_levels(tiny, 150.0, AdamConfig{.pilot_size = 10'000, .quantile = 0.1}, rng);
  EXPECT_EQ(r.schedule.levels, (std::vector<double>{150.0}));
  EXPECT_EQ(r.evaluations, 10'000u);
}

TEST(AdamTest, TinyLevelsWithTies) {
  const SystemModel tiny = tiny_model();
  Rng rng = make_stream(5, streams::kAdamPilot);
  const auto r = adam_levels(tiny, 0.0, AdamConfig{.pilot_size = 10'000, .quantile = 0.25}, rng);
  EXPECT_EQ(r.schedule.levels, (std::vector<double>{150.0, 100.0, 50.0, 0.0}));
}

TEST(AdamTest, DegenerateSystemDoesNotConverge) {
  const SystemModel m({{3, 10.0, 0.0}}, 1.0);
  Rng rng = make_stream(6, 0);
  EXPECT_THROW(adam_levels(m, 10.0, AdamConfig{.pilot_size = 200, .max_levels = 5}, rng), ConvergenceError);
}

TEST(AdamTest, LevelsStrictlyDecreaseToTarget) {
  const SystemModel rts = testing::rts_model();
  Rng rng = make_stream(7, streams::kAdamPilot);
  const auto r = adam_levels(rts, 2850.0, AdamConfig{.pilot_size = 5'000}, rng);
  EXPECT_NO_THROW(r.schedule.validate(rts.installed_capacity()));
  EXPECT_EQ(r.schedule.final_level(), 2850.0);
  EXPECT_GE(r.schedule.size(), 2u);
}

TEST(FegsTest, SingleLevelMatchesCmcs) {
  const SystemModel tiny = tiny_model();
  const std::size_t n = 5'000;
  const auto fegs = estimate_fegs(tiny, LevelSchedule{{100.0}}, FegsConfig{.sample_size = n, .replications = 1}, 11);
  const auto cmcs = estimate_cmcs(tiny, 100.0, CmcsConfig{.target_relative_error = 1e-6, .max_evaluations = n,
                                                          .batch_size = n}, 11);
  EXPECT_EQ(fegs.risk_estimate, cmcs.risk_estimate);
  EXPECT_EQ(fegs.evaluations, cmcs.evaluations);
}

TEST(FegsTest, TinyTwoLevelWithinThreeSe) {
  const SystemModel tiny = tiny_model();
  const auto r = estimate_fegs(tiny, LevelSchedule{{150.0, 100.0}}, FegsConfig{.sample_size = 10'000, .replications = 10}, 12);
  EXPECT_LE(std::abs(r.risk_estimate - 0.208), 3.0 * r.standard_error) << r.risk_estimate;
  ASSERT_EQ(r.stages.size(), 2u);
  EXPECT_NEAR(r.stages[0].conditional_probability, 0.352, 0.02);
  EXPECT_NEAR(r.stages[1].conditional_probability, 0.208 / 0.352, 0.03);
}

TEST(FegsTest, ImpossibleEventGivesZero) {
  const SystemModel tiny = tiny_model();
  const auto r = estimate_fegs(tiny, LevelSchedule{{100.0, -1.0}}, FegsConfig{.sample_size = 1'000, .replications = 3}, 13);
  EXPECT_EQ(r.risk_estimate, 0.0);
  EXPECT_FALSE(r.relative_error_defined());
  for (double e : r.replication_estimates) EXPECT_EQ(e, 0.0);
}

TEST(FegsTest, FixedEffortAccountingWithContinuousComponents) {
  UncertaintyModel u;
  u.load = GaussianComponent{120.0, 20.0};
  const SystemModel m({{2, 50.0, 0.1}, {1, 100.0, 0.2}}, 1.0, u);
  const std::size_t n = 2'000;
  Rng rng = make_stream(14, 0);
  const LevelSchedule schedule{{40.0, 0.0}};
  const auto run = fegs_replication(m, schedule, n, rng);
  ASSERT_GT(run.entrants.back(), 0u);
  // Every MCMC step changes the load draw, so each one evaluates.
  EXPECT_EQ(run.evaluations, n * schedule.size());
}

TEST(FegsTest, EstimateLiesInUnitInterval) {
  const SystemModel tiny = tiny_model();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_stream(seed, 0);
    const auto run = fegs_replication(tiny, LevelSchedule{{150.0, 100.0, 50.0, 0.0}}, 200, rng);
    EXPECT_GE(run.estimate, 0.0);
    EXPECT_LE(run.estimate, 1.0);
    EXPECT_EQ(run.entrants.size(), 4u);
  }
}

TEST(FegsTest, DeterministicForSeedRegardlessOfThreads) {
  const SystemModel tiny = tiny_model();
  const LevelSchedule schedule{{150.0, 100.0, 50.0}};
  const auto a = estimate_fegs(tiny, schedule, FegsConfig{.sample_size = 1'000, .replications = 4, .threads = 1}, 15);
  const auto b = estimate_fegs(tiny, schedule, FegsConfig{.sample_size = 1'000, .replications = 4, .threads = 4}, 15);
  EXPECT_EQ(a.replication_estimates, b.replication_estimates);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(FegsTest, UnbiasedOverManyRuns) {
  const SystemModel tiny = tiny_model();
  const double exact = 0.038;
  const auto r = estimate_fegs(tiny, LevelSchedule{{150.0, 100.0, 50.0}}, FegsConfig{.sample_size = 500, .replications = 200}, 16);
  EXPECT_LE(std::abs(r.risk_estimate - exact), 3.0 * r.standard_error) << r.risk_estimate << " se " << r.standard_error;
}

TEST(FegsTest, AdaptiveReportsPilot) {
  const SystemModel tiny = tiny_model();
  const AdamConfig adam{.pilot_size = 1'000, .quantile = 0.25};
  const FegsConfig cfg{.sample_size = 1'000, .replications = 2};
  const auto with = estimate_fegs_adaptive(tiny, 50.0, adam, cfg, 17, true);
  const auto without = estimate_fegs_adaptive(tiny, 50.0, adam, cfg, 17, false);
  EXPECT_GT(with.pilot_evaluations, 0u);
  EXPECT_EQ(with.pilot_evaluations, without.pilot_evaluations);
  EXPECT_EQ(with.evaluations, without.evaluations + with.pilot_evaluations);
  EXPECT_TRUE(with.pilot_included);
  EXPECT_EQ(with.risk_estimate, without.risk_estimate);
  EXPECT_EQ(with.levels.back(), 50.0);
}

}  // namespace
}  // namespace gsrisk
