#include <gtest/gtest.h>

#include <cmath>

#include "lasernoise/errors.hpp"
#include "lasernoise/params.hpp"
#include "oracles.hpp"

using namespace lasernoise;

namespace {

LaserParams laser(double kappa, double R) {
  LaserParams p;
  p.kappa = kappa;
  p.R = R;
  return p;
}

}  // namespace

TEST(SteadyState, UncoupledPhotonNumberIsPumpOverLoss) {
  const auto s = steady_state(laser(1.0, 100.0));
  EXPECT_DOUBLE_EQ(s.n, 100.0);
  EXPECT_DOUBLE_EQ(s.i_bar, 100.0);
  EXPECT_DOUBLE_EQ(s.n_tilde, 0.0);
}

TEST(SteadyState, CoupledSplitsPhotonsBetweenLasers) {
  const auto s = steady_state(laser(1.0, 100.0), CouplingParams::make(9.0, 1.0, 1.0));
  EXPECT_NEAR(s.n, 10.0, 1e-12);
  EXPECT_NEAR(s.n_tilde, 90.0, 1e-12);
  EXPECT_NEAR(s.i_tilde_bar, 90.0, 1e-12);
}

TEST(SteadyState, WeakSaturationRaisesWarning) {
  auto p = laser(1.0, 100.0);
  p.beta_inv = 100.0;  // beta = 0.01
  p.gamma1 = 1.0;
  p.gamma2 = 100.0;
  const auto s = steady_state(p);
  EXPECT_NEAR(s.I, 1.0, 1e-12);
  EXPECT_NEAR(s.N1_bar, 100.0, 1e-12);
  EXPECT_TRUE(s.has_warnings());
}

TEST(SteadyState, StrongSaturationHasNoWarning) {
  auto p = laser(1.0, 1e4);
  p.beta_inv = 10.0;
  const auto s = steady_state(p);
  EXPECT_NEAR(s.I, 1000.0, 1e-9);
  EXPECT_FALSE(s.has_warnings());
}

TEST(SteadyState, PolarizationProductIsHalfTheLoss) {
  const auto s = steady_state(laser(2.5, 3e4));
  EXPECT_NEAR(2.0 * s.gP_bar, 2.5 * s.n, 1e-12 * s.n);
}

TEST(SteadyState, LongitudinalRateWarningWhenGamma1NotSmall) {
  auto p = laser(1.0, 1e4);
  p.gamma1 = 500.0;
  p.gamma2 = 2000.0;
  EXPECT_TRUE(steady_state(p).has_warnings());
}

TEST(LaserParamsValidation, RejectsNonPositiveRates) {
  EXPECT_THROW(steady_state(laser(0.0, 1.0)), ParameterError);
  EXPECT_THROW(steady_state(laser(1.0, -1.0)), ParameterError);
  EXPECT_THROW(steady_state(laser(1.0, std::nan(""))), ParameterError);
  auto p = laser(1.0, 10.0);
  p.gamma_perp = 0.0;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(LaserParamsValidation, PumpParameterAboveOneRejectedNegativeAllowed) {
  auto p = laser(1.0, 10.0);
  p.p = 1.0 + 1e-9;
  EXPECT_THROW(p.validate(), ParameterError);
  p.p = -3.0;
  EXPECT_NO_THROW(p.validate());
}

TEST(LaserParamsValidation, SaturationNumberMustMatchDipoleCoupling) {
  auto p = laser(1.0, 10.0);
  p.gamma_perp = 1e3;
  p.gamma1 = 1e2;
  p.g = 10.0;
  p.beta_inv = p.gamma_perp * p.gamma1 / (2.0 * 100.0);
  EXPECT_NO_THROW(p.validate());
  p.beta_inv *= 1.0 + 1e-9;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(FeedbackParamsValidation, Domains) {
  EXPECT_NO_THROW((FeedbackParams{0.0, 1.0}.validate()));
  EXPECT_THROW((FeedbackParams{-0.1, 1.0}.validate()), ParameterError);
  EXPECT_THROW((FeedbackParams{1.0, 0.0}.validate()), ParameterError);
}

TEST(CouplingParams, RatioFollowsKappa) {
  const auto c = CouplingParams::make(30.0, 2.0, 3.0);
  EXPECT_DOUBLE_EQ(c.x, 10.0);
  EXPECT_NO_THROW(c.validate(3.0));
  EXPECT_THROW(c.validate(4.0), ParameterError);
  EXPECT_THROW(CouplingParams::make(-1.0, 1.0, 1.0).validate(1.0), ParameterError);
}

TEST(SolveKappa0, SmallIntegerExample) {
  const auto c = solve_kappa0(laser(1.0, 2.0), 1.0, 1.0);
  EXPECT_NEAR(c.kappa0, 1.0, 1e-14);
}

TEST(SolveKappa0, NoThreeLevelAtomsMeansNoCoherentPump) {
  const auto c = solve_kappa0(laser(1.0, 2.0), 0.0, 1.0);
  EXPECT_EQ(c.kappa0, 0.0);
  EXPECT_EQ(c.x, 0.0);
}

TEST(SolveKappa0, LargeConstantMatchesQuadraticFormulaAndResubstitutes) {
  const double c = 1e4;
  const auto k = solve_kappa0(laser(1.0, 100.0), c, 1.0);
  EXPECT_NEAR(k.kappa0, oracle::kappa0_root(100.0, 1.0, 1.0, c), 1e-12 * k.kappa0);
  const auto s = steady_state(laser(1.0, 100.0), k);
  EXPECT_NEAR(k.kappa0 * s.n_tilde, c, 1e-10 * c);
}

TEST(SolveKappa0, ThreeLevelParamsUseLumpedConstant) {
  ThreeLevelParams tl;
  tl.gamma2_tilde = 0.5;
  tl.g13_over_g12 = 2.0;
  tl.N_tilde = 50.0;
  tl.kappa_tilde = 3.0;
  EXPECT_DOUBLE_EQ(tl.pump_constant(), 100.0);
  const auto a = solve_kappa0(laser(1.0, 1e3), tl);
  const auto b = solve_kappa0(laser(1.0, 1e3), 100.0, 3.0);
  EXPECT_EQ(a.kappa0, b.kappa0);
  EXPECT_EQ(a.kappa_tilde, 3.0);
}

TEST(ThreeLevelParams, ValidationAndWarnings) {
  ThreeLevelParams tl;
  EXPECT_NO_THROW(tl.validate());
  EXPECT_TRUE(tl.warnings().empty());
  tl.gamma2_tilde = 5.0;  // not << gamma1_tilde = 10
  EXPECT_FALSE(tl.warnings().empty());
  tl.N_tilde = 0.5;
  EXPECT_THROW(tl.validate(), ParameterError);
  tl.N_tilde = 2.0;
  tl.g13_over_g12 = 0.0;
  EXPECT_THROW(tl.validate(), ParameterError);
}

TEST(SolveKappa0, RejectsNegativeConstant) {
  EXPECT_THROW(solve_kappa0(laser(1.0, 2.0), -1.0, 1.0), ParameterError);
}
