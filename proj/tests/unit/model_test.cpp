#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gsrisk/errors.hpp"
#include "gsrisk/model.hpp"
#include "support/test_support.hpp"

namespace gsrisk {
namespace {

using testing::tiny_model;

SystemModel tiny_with_uncertainty(double load_sigma = 10.0, double wind_sigma = 5.0) {
  UncertaintyModel u;
  u.load = GaussianComponent{120.0, load_sigma};
  u.wind = GaussianComponent{30.0, wind_sigma};
  return SystemModel({{2, 50.0, 0.1}, {1, 100.0, 0.2}}, 1.0, u);
}

TEST(ImportanceTest, RtsAllAvailableIsInstalledCapacity) {
  const SystemModel rts = testing::rts_model();
  EXPECT_EQ(importance(all_available_state(rts), rts), 3405.0);
}

TEST(ImportanceTest, TinyExamples) {
  const SystemModel tiny = tiny_model();
  EXPECT_EQ(importance({{2, 1}}, tiny), 200.0);

  const SystemModel uncertain = tiny_with_uncertainty();
  SystemState s{{1, 0}, 120.0, 30.0};
  EXPECT_EQ(importance(s, uncertain), -40.0);
}

TEST(ImportanceTest, DimensionMismatchThrows) {
  const SystemModel tiny = tiny_model();
  EXPECT_THROW(importance({{2}}, tiny), ModelMismatchError);
  EXPECT_THROW(importance({{2, 1}, 100.0, std::nullopt}, tiny), ModelMismatchError);
  EXPECT_THROW(validate_state({{3, 1}}, tiny), DomainError);
}

TEST(ImportanceTest, MonotoneInEachComponent) {
  const SystemModel m = tiny_with_uncertainty();
  Rng rng = make_stream(7, 0);
  for (int trial = 0; trial < 500; ++trial) {
    SystemState s = sample_state(m, rng);
    const double base = importance(s, m);
    for (std::size_t g = 0; g < m.station_count(); ++g) {
      if (s.available_units[g] == m.station(g).unit_count) continue;
      SystemState up = s;
      ++up.available_units[g];
      EXPECT_GE(importance(up, m), base);
    }
    SystemState more_wind = s;
    *more_wind.wind_draw += 1.0;
    EXPECT_GE(importance(more_wind, m), base);
    SystemState more_load = s;
    *more_load.load_draw += 1.0;
    EXPECT_LE(importance(more_load, m), base);
  }
}

TEST(IndicatorTest, Examples) {
  const SystemModel tiny = tiny_model();
  EXPECT_FALSE(indicator({{2, 1}}, tiny, 100.0));
  EXPECT_TRUE(indicator({{1, 0}}, tiny, 50.0));
  EXPECT_TRUE(indicator({{0, 0}}, tiny, 0.0));
}

TEST(IndicatorTest, InfiniteAndNegativeThresholds) {
  const SystemModel tiny = tiny_model();
  testing::enumerate_states(tiny, [&](const std::vector<int>& units, double) {
    EXPECT_TRUE(indicator({units}, tiny, std::numeric_limits<double>::infinity()));
    EXPECT_FALSE(indicator({units}, tiny, -1e-9));
  });
}

TEST(StationPmfTest, Examples) {
  const Station s{2, 50.0, 0.1};
  EXPECT_NEAR(station_pmf(s, 1.0, 2), 0.81, 1e-15);
  EXPECT_NEAR(station_pmf(s, 1.0, 0), 0.01, 1e-15);
  EXPECT_NEAR(station_pmf(s, 1.0, 1), 0.18, 1e-15);
  EXPECT_THROW(station_pmf(s, 1.0, 3), DomainError);
  EXPECT_THROW(station_pmf(s, 1.0, -1), DomainError);
}

TEST(StationPmfTest, SumsToOneAndMatchesLogForm) {
  Rng rng = make_stream(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Station s{uniform_int(rng, 1, 40), 10.0, uniform01(rng) * 0.2};
    const double dt = 0.5 + 4.0 * uniform01(rng);
    double sum = 0.0;
    for (int k = 0; k <= s.unit_count; ++k) {
      const double p = station_pmf(s, dt, k);
      sum += p;
      EXPECT_NEAR(p, testing::reference_pmf(s, dt, k), 1e-13);
      if (p > 1e-300) EXPECT_NEAR(std::log(p), log_station_pmf(s, dt, k), 1e-9);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(StateDensityTest, TinyExamples) {
  const SystemModel tiny = tiny_model();
  EXPECT_NEAR(state_density({{2, 1}}, tiny), 0.648, 1e-14);
  EXPECT_NEAR(state_density({{0, 0}}, tiny), 0.002, 1e-15);
}

TEST(StateDensityTest, DegenerateModelHasUnitMass) {
  const SystemModel m({{3, 10.0, 0.0}, {2, 5.0, 0.0}}, 4.0);
  EXPECT_EQ(state_density(all_available_state(m), m), 1.0);
  EXPECT_EQ(state_density({{2, 2}}, m), 0.0);
}

TEST(StateDensityTest, SumsToOneOverAllStates) {
  const SystemModel rts = testing::rts_model();
  ASSERT_LE(rts.discrete_state_count(), 1'000'000u);
  double sum = 0.0;
  testing::enumerate_states(rts, [&](const std::vector<int>& units, double) { sum += state_density({units}, rts); });
  EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(StateDensityTest, IncludesGaussianFactors) {
  const SystemModel m = tiny_with_uncertainty(10.0, 5.0);
  const SystemState s{{2, 1}, 130.0, 25.0};
  const double gauss_load = std::exp(-0.5) / (10.0 * std::sqrt(2.0 * M_PI));
  const double gauss_wind = std::exp(-0.5) / (5.0 * std::sqrt(2.0 * M_PI));
  EXPECT_NEAR(state_density(s, m), 0.648 * gauss_load * gauss_wind, 1e-15);
}

TEST(SampleStateTest, NoOutagesGivesAllAvailable) {
  const SystemModel m({{3, 10.0, 0.0}, {2, 5.0, 0.0}}, 4.0);
  Rng rng = make_stream(1, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_state(m, rng), all_available_state(m));
}

TEST(SampleStateTest, ZeroSigmaIsPointMass) {
  UncertaintyModel u;
  u.load = GaussianComponent{2850.0, 0.0};
  const SystemModel m({{2, 50.0, 0.1}}, 1.0, u);
  Rng rng = make_stream(2, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(*sample_state(m, rng).load_draw, 2850.0);
}

TEST(SampleStateTest, FrequencyOfFullStateWithinThreeSigma) {
  const SystemModel tiny = tiny_model();
  Rng rng = make_stream(3, 0);
  const int n = 1'000'000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += sample_state(tiny, rng) == SystemState{{2, 1}};
  const double p = 0.648;
  EXPECT_NEAR(hits / double(n), p, 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(SampleStateTest, ChiSquareAgainstDensity) {
  const SystemModel tiny = tiny_model();
  Rng rng = make_stream(4, 0);
  std::vector<double> observed(tiny.discrete_state_count(), 0.0);
  for (int i = 0; i < 100'000; ++i)
    observed[testing::state_index(tiny, sample_state(tiny, rng).available_units)] += 1.0;
  std::vector<double> expected(observed.size());
  testing::enumerate_states(tiny, [&](const std::vector<int>& units, double p) {
    expected[testing::state_index(tiny, units)] = p;
  });
  const auto chi = testing::chi_square(observed, expected);
  EXPECT_TRUE(chi.passes(0.01)) << chi.statistic << " > " << chi.critical(0.01);
}

TEST(SampleStateTest, DeterministicGivenStream) {
  const SystemModel m = tiny_with_uncertainty();
  Rng a = make_stream(99, 3);
  Rng b = make_stream(99, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_state(m, a), sample_state(m, b));
}

TEST(SampleStateTest, TruncatedComponentIsNonNegative) {
  UncertaintyModel u;
  u.wind = GaussianComponent{5.0, 20.0, true};
  const SystemModel m({{1, 10.0, 0.1}}, 1.0, u);
  Rng rng = make_stream(5, 0);
  for (int i = 0; i < 10'000; ++i) EXPECT_GE(*sample_state(m, rng).wind_draw, 0.0);
  EXPECT_EQ(log_component_density(*u.wind, -1.0), -std::numeric_limits<double>::infinity());
}

TEST(SystemModelTest, ValidatesInvariants) {
  EXPECT_THROW(SystemModel({}, 1.0), ValidationError);
  EXPECT_THROW(SystemModel({{1, 10.0, 0.5}}, 2.0), ValidationError);
  EXPECT_THROW(SystemModel({{0, 10.0, 0.1}}, 1.0), ValidationError);
  EXPECT_THROW(SystemModel({{1, -10.0, 0.1}}, 1.0), ValidationError);
  EXPECT_THROW(SystemModel({{1, 10.0, -0.1}}, 1.0), ValidationError);
  EXPECT_THROW(SystemModel({{1, 10.0, 0.1}}, 0.0), ValidationError);
  UncertaintyModel u;
  u.load = GaussianComponent{100.0, -1.0};
  EXPECT_THROW(SystemModel({{1, 10.0, 0.1}}, 1.0, u), ValidationError);
}

TEST(SystemModelTest, RiskThresholdAndInitialLevel) {
  const SystemModel tiny = tiny_model();
  EXPECT_EQ(risk_threshold(tiny, 120.0), 120.0);
  EXPECT_EQ(initial_level(tiny), 200.0);
  const SystemModel uncertain = tiny_with_uncertainty();
  EXPECT_EQ(risk_threshold(uncertain, 120.0), 0.0);
  EXPECT_TRUE(std::isinf(initial_level(uncertain)));
}

}  // namespace
}  // namespace gsrisk
