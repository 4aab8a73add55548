#include <gtest/gtest.h>

#include <fstream>

#include "gsrisk/config_io.hpp"
#include "gsrisk/errors.hpp"
#include "support/test_support.hpp"

namespace gsrisk {
namespace {

TEST(ConfigIoTest, RtsModel) {
  const SystemModel rts = testing::rts_model();
  EXPECT_EQ(rts.station_count(), 9u);
  EXPECT_DOUBLE_EQ(rts.installed_capacity(), 3405.0);
  EXPECT_EQ(rts.lead_time_hours(), 4.0);
  EXPECT_EQ(rts.discrete_state_count(), 504'000u);
  EXPECT_FALSE(rts.uncertainty().enabled());
}

TEST(ConfigIoTest, ParsesUncertaintyBlocks) {
  const SystemModel m = parse_model(R"(
    # two stations
    lead_time_hours = 2
    station { count = 2  capacity_mw = 50  outage_rate_per_hour = 0.05 }
    station { count = 1; capacity_mw = 100; outage_rate_per_hour = 0.1 }
    load { forecast_mw = 120  sigma_mw = 6 }
    wind { forecast_mw = 30  sigma_mw = 3  truncate_at_zero = true }
  )");
  EXPECT_EQ(m.station_count(), 2u);
  ASSERT_TRUE(m.uncertainty().load.has_value());
  EXPECT_EQ(m.uncertainty().load->sigma_mw, 6.0);
  ASSERT_TRUE(m.uncertainty().wind.has_value());
  EXPECT_TRUE(m.uncertainty().wind->truncate_at_zero);
}

TEST(ConfigIoTest, InvariantViolationsAreValidationErrors) {
  EXPECT_THROW(parse_model("lead_time_hours = 4\n"), ValidationError);
  EXPECT_THROW(parse_model("lead_time_hours = 4\nstation { count = 1 capacity_mw = 10 outage_rate_per_hour = 0.25 }\n"),
               ValidationError);
  EXPECT_THROW(parse_model("lead_time_hours = 1\nstation { count = 0 capacity_mw = 10 outage_rate_per_hour = 0.1 }\n"),
               ValidationError);
}

TEST(ConfigIoTest, ParseErrorsCarryLineAndField) {
  try {
    parse_model("lead_time_hours = 1\nstation {\n  count = 2\n  capacity_mw = abc\n  outage_rate_per_hour = 0.1\n}\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.field(), "station[0].capacity_mw");
  }
  try {
    parse_model("lead_time_hours = 1\nstation { count = 2 capacity_mw = 5 colour = 3 outage_rate_per_hour = 0.1 }\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "station[0].colour");
  }
}

TEST(ConfigIoTest, SchemaViolations) {
  EXPECT_THROW(parse_model("station { count = 1 capacity_mw = 10 outage_rate_per_hour = 0.1 }\n"), ParseError);
  EXPECT_THROW(parse_model("lead_time_hours = 1\nlead_time_hours = 2\n"), ParseError);
  EXPECT_THROW(parse_model("lead_time_hours = 1\nstation { count = 1 count = 2 capacity_mw = 10 outage_rate_per_hour = 0.1 }\n"),
               ParseError);
  EXPECT_THROW(parse_model("lead_time_hours = 1\nstation { count = 1 capacity_mw = 10 }\n"), ParseError);
  EXPECT_THROW(parse_model("lead_time_hours = 1\nstation { count = 1.5 capacity_mw = 10 outage_rate_per_hour = 0.1 }\n"),
               ParseError);
  EXPECT_THROW(parse_model("lead_time_hours = 1\nstation { count = 1 capacity_mw = 10 outage_rate_per_hour = 0.1\n"),
               ParseError);
  EXPECT_THROW(parse_model("lead_time_hours = 1\nstation { count = 1 capacity_mw = 10 outage_rate_per_hour = 0.1 }\n"
                           "load { forecast_mw = 1 sigma_mw = 1 }\nload { forecast_mw = 1 sigma_mw = 1 }\n"),
               ParseError);
}

TEST(ConfigIoTest, LoadModelReportsPath) {
  try {
    load_model("/nonexistent/model.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/model.cfg"), std::string::npos);
  }
}

TEST(ConfigIoTest, RoundTripRandomModels) {
  Rng rng = make_stream(1, 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Station> stations;
    const int g_count = uniform_int(rng, 1, 6);
    for (int g = 0; g < g_count; ++g)
      stations.push_back({uniform_int(rng, 1, 8), 1.0 + 400.0 * uniform01(rng), 0.01 * uniform01(rng)});
    UncertaintyModel u;
    if (uniform01(rng) < 0.5) u.load = GaussianComponent{1000.0 * uniform01(rng), 50.0 * uniform01(rng)};
    if (uniform01(rng) < 0.5) u.wind = GaussianComponent{300.0 * uniform01(rng), 30.0 * uniform01(rng), uniform01(rng) < 0.5};
    const SystemModel m(stations, 0.5 + 4.0 * uniform01(rng), u);
    const SystemModel back = parse_model(serialize_model(m));
    ASSERT_EQ(back, m) << serialize_model(m);
    EXPECT_EQ(serialize_model(back), serialize_model(m));
  }
}

}  // namespace
}  // namespace gsrisk
