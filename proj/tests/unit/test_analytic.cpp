#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lasernoise/analytic.hpp"
#include "lasernoise/spectrum.hpp"
#include "oracles.hpp"

using namespace lasernoise;
namespace an = lasernoise::analytic;

TEST(SingleLaser, PoissonPumpIsShotNoise) {
  for (double w : {0.0, 0.3, 1.0, 7.0, 1e3}) EXPECT_DOUBLE_EQ(an::single(0.0, w), 1.0);
}

TEST(SingleLaser, RegularPumpSuppressesZeroFrequency) {
  EXPECT_DOUBLE_EQ(an::single(1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(an::single(1.0, 1.0), 0.5);
}

TEST(SingleLaser, MatchesPolynomialForm) {
  for (double p : {-1.0, 0.0, 0.5, 1.0})
    for (double w : {0.0, 0.01, 0.5, 2.0, 40.0}) EXPECT_NEAR(an::single(p, w), oracle::single_poly(p, w), 1e-15);
}

TEST(FeedbackLoop, ZeroGainReducesToFreeLaser) {
  const auto grid = linear_grid(200, 0.0, 20.0);
  for (double p : {-1.0, 0.0, 0.5, 1.0}) {
    const auto a = an::s_fbl(p, 0.0, grid);
    const auto b = an::s_single(p, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_NEAR(a.values[j], b.values[j], 1e-15);
  }
}

TEST(FeedbackLoop, GainNineGivesOnePercentAtDc) {
  EXPECT_NEAR(an::fbl(0.0, 9.0, 0.0), 0.01, 1e-15);
  EXPECT_NEAR(an::fbl(0.0, 9.0, 0.0), (1.0 - 0.0) / 100.0, 1e-15);
}

TEST(FeedbackLoop, RegularPumpLargeGainVanishesAtDc) {
  EXPECT_LE(std::abs(an::fbl(1.0, 1e6, 0.0)), 1e-12);
}

TEST(FeedbackLoop, MatchesHandWrittenTransferFunction) {
  for (double p : {-1.0, 0.0, 0.5, 1.0})
    for (double l : {0.0, 1.0, 9.0, 100.0})
      for (double w : {0.0, 0.1, 3.0, 50.0}) EXPECT_NEAR(an::fbl(p, l, w), oracle::fbl_transfer(p, l, w), 1e-13);
}

TEST(CoupledPair, ZeroFrequencyExamples) {
  EXPECT_NEAR(an::coupled(0.0, 1.0, 1.0, 100.0, 0.0), 1.0 - 202.0 / 10404.0, 1e-15);
  EXPECT_NEAR(an::coupled(1.0, 1.0, 1.0, 100.0, 0.0), 1.0 - 10302.0 / 10404.0, 1e-15);
  EXPECT_NEAR(an::coupled(1.0, 1.0, 1.0, 100.0, 0.0), 0.0098, 1e-4);
}

TEST(CoupledPair, MatchesPolynomialFormWithUnequalWidths) {
  for (double p : {-1.0, 0.0, 0.5, 1.0})
    for (double w : {0.0, 0.2, 1.5, 30.0})
      EXPECT_NEAR(an::coupled(p, 1.3, 0.7, 20.0, w), oracle::coupled_poly(p, 1.3, 0.7, 20.0, w), 1e-14);
}

TEST(CoupledPair, StrongCouplingApproachesFreeLaser) {
  const auto grid = linear_grid(512, 0.0, 20.0);
  for (double X : {1e2, 1e3, 1e4})
    for (double p : {0.0, 1.0}) {
      double dev = 0.0;
      for (double w : grid) dev = std::max(dev, std::abs(an::coupled(p, 1.0, 1.0, X, w) - an::single(p, w)));
      EXPECT_LE(dev, 3.0 / X) << "X=" << X << " p=" << p;
    }
}

TEST(CoupledFeedback, ZeroGainEqualsCoupledPair) {
  for (double w : {0.0, 0.4, 5.0})
    EXPECT_NEAR(an::coupled_fbl(0.0, 100.0, w), an::coupled(0.0, 1.0, 1.0, 100.0, w), 1e-14);
}

TEST(CoupledFeedback, MatchesIndependentTransferFunction) {
  for (double l : {0.0, 1.0, 30.0, 1e3})
    for (double x : {0.5, 10.0, 1e3})
      for (double w : {0.0, 0.7, 9.0}) {
        const double ref = oracle::coupled_fbl_transfer(0.0, l, x, w);
        EXPECT_NEAR(an::coupled_fbl(l, x, w), ref, 1e-10 * std::max(1.0, std::abs(ref)));
      }
}

TEST(CoupledFeedback, SuperShotNoiseNearStrongLimit) {
  const double v = an::coupled_fbl(100.0, 100.0, 0.0);
  EXPECT_GT(v, 1.0);
  EXPECT_NEAR(v, 26.0, 0.05 * 26.0);
  for (double l : {10.0, 100.0, 1e3})
    for (double x : {10.0, 100.0, 1e3}) EXPECT_GT(an::coupled_fbl(l, x, 0.0), 1.0) << l << " " << x;
}

TEST(CoupledFeedback, GeneralFormWithUnitWidthsIsPublicForm) {
  for (double w : {0.0, 1.0, 4.0})
    EXPECT_DOUBLE_EQ(an::coupled_fbl_general(30.0, 1.0, 1.0, 50.0, w), an::coupled_fbl(30.0, 50.0, w));
}

TEST(StrongLimit, Examples) {
  EXPECT_DOUBLE_EQ(an::strong_limit(100.0, 0.0), 26.0);
  EXPECT_DOUBLE_EQ(an::strong_limit(100.0, 2.0), 13.5);
  EXPECT_NEAR(an::strong_limit(100.0, 1e6), 1.0, 1e-9);
  EXPECT_NEAR(an::strong_limit(37.0, 3.0), oracle::strong_limit(37.0, 3.0), 1e-15);
}

TEST(StrongLimit, CoupledFeedbackWithinFivePercentOnLowBand) {
  const auto grid = linear_grid(512, 0.0, 10.0);
  for (double w : grid) {
    const double lim = an::strong_limit(1e3, w);
    EXPECT_LE(std::abs(an::coupled_fbl(1e3, 1e3, w) - lim), 0.05 * lim) << w;
  }
}

TEST(Curves, AllApproachShotFloorAtHighFrequency) {
  const std::vector<double> w{1e3};
  EXPECT_NEAR(an::s_single(1.0, w).values[0], 1.0, 1e-3);
  EXPECT_NEAR(an::s_fbl(1.0, 9.0, w).values[0], 1.0, 1e-3);
  EXPECT_NEAR(an::s_coupled(1.0, 1.0, 1.0, 100.0, w).values[0], 1.0, 1e-3);
  EXPECT_NEAR(an::s_coupled_fbl(10.0, 10.0, w).values[0], 1.0, 1e-3);
  EXPECT_NEAR(an::s_strong_limit(100.0, w).values[0], 1.0, 1e-3);
}

TEST(Curves, SymmetricUnderFrequencyReflection) {
  for (double w : {0.1, 2.0, 17.0}) {
    EXPECT_EQ(an::single(0.3, w), an::single(0.3, -w));
    EXPECT_EQ(an::fbl(0.3, 4.0, w), an::fbl(0.3, 4.0, -w));
    EXPECT_EQ(an::coupled(0.3, 1.0, 2.0, 40.0, w), an::coupled(0.3, 1.0, 2.0, 40.0, -w));
    EXPECT_EQ(an::coupled_fbl(4.0, 40.0, w), an::coupled_fbl(4.0, 40.0, -w));
  }
}

TEST(Curves, CarryGridAndParameterEcho) {
  const auto grid = default_grid();
  const auto c = an::s_fbl(0.5, 9.0, grid);
  EXPECT_EQ(c.omega, grid);
  EXPECT_FALSE(c.has_ci());
  EXPECT_NO_THROW(c.validate());
  EXPECT_TRUE(c.find_meta("lambda").has_value());
}

TEST(Grids, DefaultIsLogSpacedWithZero) {
  const auto g = default_grid();
  ASSERT_EQ(g.size(), 513u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_NEAR(g[1], 1e-2, 1e-16);
  EXPECT_NEAR(g.back(), 1e2, 1e-12);
  EXPECT_NEAR(g[2] / g[1], g[100] / g[99], 1e-12);
}

TEST(Grids, ParseSpec) {
  const auto lin = parse_grid("5,0,20");
  EXPECT_EQ(lin, (std::vector<double>{0, 5, 10, 15, 20}));
  const auto lg = parse_grid("3,1,100");
  ASSERT_EQ(lg.size(), 4u);
  EXPECT_NEAR(lg[2], 10.0, 1e-12);
  EXPECT_THROW(parse_grid("3,10,1"), std::invalid_argument);
  EXPECT_THROW(parse_grid("abc"), std::invalid_argument);
  EXPECT_THROW(parse_grid("1,0,1"), std::invalid_argument);
  EXPECT_THROW(parse_grid("4,-1,1"), std::invalid_argument);
}
