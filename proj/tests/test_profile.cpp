#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qho/profile.hpp"

using namespace qho;

TEST(Profile, KindNames) {
  for (auto k : {ProfileKind::V1D, ProfileKind::V2DRadial, ProfileKind::Curved})
    EXPECT_EQ(profile_kind_from_string(to_string(k)), k);
  EXPECT_THROW(profile_kind_from_string("v3d"), Error);
}

TEST(Profile, DeformedWellRisesToItsAsymptote) {
  ProfileSpec spec;
  spec.kind = ProfileKind::V1D;
  spec.curvature = 1;
  spec.strength = 1;
  spec.from = 0;
  spec.to = 50;
  spec.count = 501;
  const auto t = profile(spec);
  ASSERT_EQ(t.rows.size(), 501u);
  EXPECT_TRUE(t.warnings.empty());
  EXPECT_EQ(t.rows.front().value, 0.0);
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    EXPECT_GT(t.rows[k].value, t.rows[k - 1].value);
    EXPECT_LT(t.rows[k].value, 0.5);
  }
  EXPECT_NEAR(t.rows.back().value, 0.5, 1e-3);
}

TEST(Profile, NegativeLambdaStopsAtTheRim) {
  ProfileSpec spec;
  spec.kind = ProfileKind::V2DRadial;
  spec.curvature = -1;
  spec.points = {0.0, 0.5, 0.99, 1.0, 1.5};
  const auto t = profile(spec);
  EXPECT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.warnings.size(), 2u);
  EXPECT_NEAR(t.rows[1].value, 0.5 * 0.25 / 0.75, 1e-15);
}

TEST(Profile, CurvedWallAndPole) {
  ProfileSpec spec;
  spec.kind = ProfileKind::Curved;
  spec.curvature = 1;
  spec.strength = 1;
  spec.points = {0.0, std::numbers::pi / 4, std::numbers::pi / 2, 1.2};
  const auto t = profile(spec);
  ASSERT_EQ(t.rows.size(), 3u);
  ASSERT_EQ(t.warnings.size(), 1u);
  EXPECT_NEAR(t.rows[1].value, 0.5, 1e-15);
  EXPECT_EQ(t.rows[2].coord, 1.2);

  spec.curvature = -1;
  spec.points = {0.0, 1.0, 30.0};
  const auto h = profile(spec);
  EXPECT_NEAR(h.rows[1].value, 0.5 * std::pow(std::tanh(1.0), 2), 1e-15);
  EXPECT_NEAR(h.rows[2].value, 0.5, 1e-15);

  spec.curvature = 0;
  spec.points = {2.0};
  EXPECT_DOUBLE_EQ(profile(spec).rows.at(0).value, 2.0);
}

TEST(Profile, CsvFormat) {
  ProfileSpec spec;
  spec.curvature = 0;
  spec.points = {0.0, 1.0};
  std::ostringstream os;
  write_profile_csv(os, profile(spec));
  EXPECT_EQ(os.str(), "coord,value\n0,0\n1,0.5\n");
}
