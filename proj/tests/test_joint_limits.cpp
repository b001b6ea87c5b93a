#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "headimit/joint_limits.hpp"
#include "test_support.hpp"

using namespace headimit;
using testing_support::constant_table;
using testing_support::shipped_table;

namespace {

PitchLimitModel flat_model(double lo, double hi) {
  PitchLimitModel m;
  m.min_model.bias = lo;
  m.max_model.bias = hi;
  return m;
}

}  // namespace

TEST(LimitTable, ShippedTableIsValid) {
  const LimitTable t = shipped_table();
  EXPECT_EQ(t.rows.size(), 13u);
  EXPECT_LE(t.rows.front().yaw_deg, -119.5);
  EXPECT_GE(t.rows.back().yaw_deg, 119.5);
}

TEST(LimitTable, RejectsBadTables) {
  LimitTable t = constant_table(-30, 20);
  t.rows[2].min_pitch_deg = 25;
  EXPECT_THROW(validate(t), InvalidTable);
  t = constant_table(-30, 20);
  t.rows[3].yaw_deg = t.rows[2].yaw_deg;
  EXPECT_THROW(validate(t), InvalidTable);
  t = constant_table(-30, 20);
  t.rows.back().yaw_deg = 100;
  EXPECT_THROW(validate(t), InvalidTable);
  t.rows.resize(1);
  EXPECT_THROW(validate(t), InvalidTable);
  EXPECT_THROW(limit_table_from_json(nlohmann::json::parse(R"([{"yaw": 0}])")), InvalidTable);
}

TEST(LimitTable, PiecewiseLinearLookup) {
  LimitTable t;
  t.rows = {{-120, -10, 10}, {0, -30, 30}, {120, -10, 10}};
  const auto b = table_bounds(t, 60);
  EXPECT_DOUBLE_EQ(b.min_deg, -20);
  EXPECT_DOUBLE_EQ(b.max_deg, 20);
  EXPECT_DOUBLE_EQ(table_bounds(t, 200).max_deg, 10);
}

TEST(FitPitchLimits, ConstantTable) {
  const auto m = fit_pitch_limit_model(constant_table(-30, 20));
  for (double y = -119.5; y <= 119.5; y += 0.5) {
    EXPECT_NEAR(m.min_model.predict(y), -30.0, 0.1);
    EXPECT_NEAR(m.max_model.predict(y), 20.0, 0.1);
  }
}

TEST(FitPitchLimits, ShippedTableKnotsWithinOneDegree) {
  const LimitTable t = shipped_table();
  const auto m = fit_pitch_limit_model(t);
  for (const auto& r : t.rows) {
    EXPECT_LE(std::abs(m.min_model.predict(r.yaw_deg) - r.min_pitch_deg), 1.0) << r.yaw_deg;
    EXPECT_LE(std::abs(m.max_model.predict(r.yaw_deg) - r.max_pitch_deg), 1.0) << r.yaw_deg;
  }
}

TEST(FitPitchLimits, LowRegularizationCannotMeetTolerance) {
  svr::Hyperparams hp;
  hp.c = 100;
  EXPECT_THROW(fit_pitch_limit_model(shipped_table(), hp), FitFailure);
}

TEST(FitPitchLimits, BitIdenticalAcrossRuns) {
  const auto a = fit_pitch_limit_model(shipped_table());
  const auto b = fit_pitch_limit_model(shipped_table());
  ASSERT_EQ(a.min_model.coefficients.size(), b.min_model.coefficients.size());
  EXPECT_EQ(std::memcmp(a.min_model.coefficients.data(), b.min_model.coefficients.data(),
                        a.min_model.coefficients.size() * sizeof(double)),
            0);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(FitPitchLimits, FuzzedSmallTablesNeverCross) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lo(-40, -5), width(1, 40);
  std::uniform_int_distribution<int> nrows(2, 6);
  int fitted = 0;
  for (int trial = 0; trial < 60; ++trial) {
    LimitTable t;
    const int n = nrows(rng);
    for (int i = 0; i < n; ++i) {
      const double y = -120.0 + 240.0 * i / (n - 1);
      const double a = lo(rng);
      t.rows.push_back({y, a, a + width(rng)});
    }
    try {
      const auto m = fit_pitch_limit_model(t);
      ++fitted;
      for (double y = -120; y <= 120; y += 0.5)
        EXPECT_LT(m.min_model.predict(y), m.max_model.predict(y));
    } catch (const FitFailure&) {
    }
  }
  EXPECT_GT(fitted, 0);
}

TEST(FitPitchLimits, ModelJsonRoundTrip) {
  const auto m = fit_pitch_limit_model(shipped_table());
  const auto back = pitch_limit_model_from_json(nlohmann::json::parse(to_json(m).dump()));
  for (double y = -119.5; y <= 119.5; y += 7.5) {
    EXPECT_DOUBLE_EQ(back.min_model.predict(y), m.min_model.predict(y));
    EXPECT_DOUBLE_EQ(back.max_model.predict(y), m.max_model.predict(y));
  }
}

TEST(PitchBounds, MarginAsWrittenWidensNegativeMin) {
  const auto b = pitch_bounds(flat_model(-30, 20), 0.0);
  EXPECT_DOUBLE_EQ(b.min_deg, -31.5);
  EXPECT_DOUBLE_EQ(b.max_deg, 19.0);
}

TEST(PitchBounds, SafeMarginShrinksTowardZero) {
  const auto b = pitch_bounds(flat_model(-30, 20), 0.0, MarginMode::kTowardZero);
  EXPECT_DOUBLE_EQ(b.min_deg, -28.5);
  EXPECT_DOUBLE_EQ(b.max_deg, 19.0);
}

TEST(PitchBounds, ZeroWidthIsInverted) {
  EXPECT_THROW(pitch_bounds(flat_model(0, 0), 0.0), InvertedBounds);
  EXPECT_THROW(pitch_bounds(flat_model(0, 0), 0.0, MarginMode::kTowardZero), InvertedBounds);
}

TEST(PitchBounds, YawOutsideRangeRejected) {
  EXPECT_THROW(pitch_bounds(flat_model(-30, 20), 120.0), Rejected);
}

TEST(PitchBounds, ShippedSweepOrdered) {
  const auto m = fit_pitch_limit_model(shipped_table());
  for (MarginMode mode : {MarginMode::kAsWritten, MarginMode::kTowardZero})
    for (double y = -119.5; y <= 119.5; y += 0.5) {
      const auto b = pitch_bounds(m, y, mode);
      EXPECT_LT(b.min_deg, b.max_deg) << y;
    }
}

TEST(ClampPitch, ThreeCases) {
  const PitchBounds b{-28.5, 19.0};
  EXPECT_EQ(clamp_pitch(50, b), 19.0);
  EXPECT_EQ(clamp_pitch(-40, b), -28.5);
  EXPECT_EQ(clamp_pitch(5, b), 5.0);
}

TEST(ClampPitch, OutputAlwaysInsideBounds) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> psi(-180, 180), a(-50, 0), w(0.01, 60);
  for (int i = 0; i < 10000; ++i) {
    const double lo = a(rng);
    const PitchBounds b{lo, lo + w(rng)};
    const double v = clamp_pitch(psi(rng), b);
    EXPECT_GE(v, b.min_deg);
    EXPECT_LE(v, b.max_deg);
  }
}
