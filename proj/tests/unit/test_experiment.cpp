#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lasernoise/analytic.hpp"
#include "lasernoise/experiment.hpp"
#include "oracles.hpp"

using namespace lasernoise;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lasernoise_experiment_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Small but valid Monte Carlo setup: 1024-bin segments need ~1040 time units.
ExperimentConfig small_simulation(const std::string& dir) {
  ExperimentConfig c;
  c.routes = {Route::Simulate};
  c.sim.duration = 1100.0;
  c.sim.seed = 5;
  c.trajectories = 2;
  c.welch.segment_length = 1024;
  c.welch.bands = 20;
  c.output_dir = scratch(dir);
  return c;
}

}  // namespace

TEST(Compare, IdenticalCurvesPass) {
  const auto grid = default_grid();
  const auto a = analytic::s_single(0.4, grid);
  const auto r = compare(a, a, 0.0, 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_abs, 0.0);
  EXPECT_EQ(r.max_rel, 0.0);
  EXPECT_EQ(r.points, grid.size());
  EXPECT_FALSE(r.ci_coverage.has_value());
}

TEST(Compare, FeedbackVersusFreeRunningAtZeroFrequency) {
  const std::vector<double> grid{0.0};
  const auto r = compare(analytic::s_fbl(0.0, 9.0, grid), analytic::s_single(0.0, grid), 0.0, 0.0);
  EXPECT_NEAR(r.max_abs, 0.99, 1e-12);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(compare(analytic::s_fbl(0.0, 9.0, grid), analytic::s_single(0.0, grid), 0.99 + 1e-12, 0.0).pass);
}

TEST(Compare, CoupledVersusSingleWorstAtZero) {
  const auto grid = default_grid();
  const auto r = compare(analytic::s_coupled(0.0, 1.0, 1.0, 100.0, grid), analytic::s_single(0.0, grid), 0.0, 0.0);
  const double expect = std::abs(oracle::coupled_poly(0.0, 1.0, 1.0, 100.0, 0.0) - 1.0);
  EXPECT_NEAR(r.max_abs, expect, 1e-12);
  EXPECT_NEAR(r.max_abs, 0.0194, 5e-4);
  EXPECT_EQ(r.omega_worst, 0.0);
}

TEST(Compare, ToleranceIsAbsolutePlusRelative) {
  SpectrumCurve a, b;
  a.omega = b.omega = {1.0, 2.0};
  b.values = {2.0, 4.0};
  a.values = {2.1, 4.1};
  EXPECT_TRUE(compare(a, b, 0.0, 0.051).pass);
  EXPECT_FALSE(compare(a, b, 0.0, 0.02).pass);
  EXPECT_TRUE(compare(a, b, 0.061, 0.02).pass);
  EXPECT_NEAR(compare(a, b, 0.0, 0.0).max_rel, 0.05, 1e-12);
  EXPECT_EQ(compare(a, b, 0.0, 0.0).omega_worst, 1.0);  // ties keep the first point
}

TEST(Compare, CiCoverageCriterion) {
  SpectrumCurve mc, ref;
  for (int j = 0; j < 10; ++j) {
    mc.omega.push_back(j);
    ref.omega.push_back(j);
    ref.values.push_back(1.0);
    mc.values.push_back(1.0);
    mc.ci_low.push_back(j < 9 ? 0.9 : 1.05);  // last point misses
    mc.ci_high.push_back(1.1);
  }
  const auto r = compare(mc, ref, 0.0, 0.0, 0.9);
  ASSERT_TRUE(r.ci_coverage.has_value());
  EXPECT_DOUBLE_EQ(*r.ci_coverage, 0.9);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(compare(mc, ref, 0.0, 0.0, 0.95).pass);
}

TEST(Compare, GridMismatchThrows) {
  const auto a = analytic::s_single(0.0, linear_grid(10, 0.0, 1.0));
  const auto b = analytic::s_single(0.0, linear_grid(10, 0.0, 2.0));
  const auto c = analytic::s_single(0.0, linear_grid(11, 0.0, 1.0));
  EXPECT_THROW(compare(a, b, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(compare(a, c, 0.0, 0.0), std::invalid_argument);
}

TEST(Routes, AnalyticRouteEchoesParameters) {
  ExperimentConfig c;
  c.scenario = ScenarioKind::Fbl;
  c.lambda = 3.0;
  c.p = 0.5;
  const auto curve = analytic_route(c, {0.0, 1.0});
  EXPECT_EQ(curve.label, "analytic");
  EXPECT_EQ(curve.find_meta("scenario"), "fbl");
  EXPECT_EQ(curve.find_meta("lambda"), "3");
  EXPECT_EQ(curve.find_meta("p"), "0.5");
  EXPECT_NEAR(curve.values[1], oracle::fbl_transfer(0.5, 3.0, 1.0), 1e-12);
}

TEST(Routes, CoupledFblClosedFormRequiresPZero) {
  ExperimentConfig c;
  c.scenario = ScenarioKind::CoupledFbl;
  c.p = 0.5;
  c.lambda = 1.0;
  c.kappa0_over_kappa = 1.0;
  EXPECT_THROW(analytic_route(c, {0.0}), ConfigError);
  EXPECT_NO_THROW(engine_route(c, {0.0}));
}

TEST(Routes, CausalEngineLabel) {
  ExperimentConfig c;
  c.scenario = ScenarioKind::Fbl;
  c.lambda = 2.0;
  const auto curve = engine_route(c, {0.0, 1.0}, 50.0);
  EXPECT_EQ(curve.label, "engine-causal");
  EXPECT_EQ(curve.find_meta("filter_bandwidth"), "50");
  EXPECT_NEAR(curve.values[1], oracle::fbl_filtered_transfer(0.0, 2.0, 50.0, 1.0), 1e-10);
}

TEST(Routes, SimulateRefusesCoupled) {
  ExperimentConfig c;
  c.scenario = ScenarioKind::Coupled;
  c.kappa0_over_kappa = 1.0;
  EXPECT_THROW(simulate_route(c), ConfigError);
}

TEST(Run, SingleAnalyticVersusEngine) {
  ExperimentConfig c;
  c.p = 1.0;
  c.laser.p = 1.0;
  c.grid = GridSpec{512, 0.0, 20.0};
  c.output_dir = scratch("single");
  const auto r = run(c);
  EXPECT_EQ(r.exit_code, 0);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_EQ(r.reports[0].name, "engine vs analytic");
  EXPECT_LE(r.reports[0].max_rel, 1e-9);
  for (const char* f : {"single_analytic.csv", "single_engine.csv", "single_analytic.dat", "single_engine.dat", "report.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(c.output_dir / f)) << f;
  }
  const std::string report = slurp(c.output_dir / "report.txt");
  EXPECT_NE(report.find("overall: PASS"), std::string::npos);
  EXPECT_NE(report.find("max_rel_deviation:"), std::string::npos);
  std::filesystem::remove_all(c.output_dir);
}

TEST(Run, CoupledFblReportsStrongLimit) {
  ExperimentConfig c;
  c.scenario = ScenarioKind::CoupledFbl;
  c.lambda = 1e3;
  c.kappa0_over_kappa = 1e3;
  c.output_dir = scratch("limit");
  const auto r = run(c);
  EXPECT_EQ(r.exit_code, 0);
  const CompareReport* limit = nullptr;
  for (const auto& rep : r.reports) {
    if (rep.name.find("strong-limit") != std::string::npos) limit = &rep;
  }
  ASSERT_NE(limit, nullptr);
  EXPECT_FALSE(limit->gating);
  EXPECT_TRUE(limit->pass) << "max_rel " << limit->max_rel;
  EXPECT_LE(limit->max_rel, 0.05);
  std::filesystem::remove_all(c.output_dir);
}

TEST(Run, InvalidConfigIsRejectedBeforeAnyOutput) {
  ExperimentConfig c;
  c.scenario = ScenarioKind::Fbl;
  c.lambda = 2.0;
  c.tolerance_abs = -1.0;
  c.output_dir = scratch("invalid");
  EXPECT_THROW(run(c), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(c.output_dir));
}

TEST(Run, IntermediatePumpIsFlagged) {
  auto c = small_simulation("intermediate");
  c.p = 0.5;
  c.laser.p = 0.5;
  const auto r = run(c);
  ASSERT_FALSE(r.reports.empty());
  for (const auto& rep : r.reports) {
    bool flagged = false;
    for (const auto& n : rep.notes) flagged = flagged || n.find("intermediate-p: low-frequency check only") == 0;
    EXPECT_TRUE(flagged) << rep.name;
    EXPECT_LT(rep.points, r.curves.at(Route::Simulate).size());
  }
  EXPECT_NE(slurp(c.output_dir / "report.txt").find("intermediate-p: low-frequency check only"), std::string::npos);
  std::filesystem::remove_all(c.output_dir);
}

TEST(Run, SameSeedGivesByteIdenticalCsv) {
  auto a = small_simulation("det_a");
  auto b = small_simulation("det_b");
  a.routes = b.routes = {Route::Analytic, Route::Engine, Route::Simulate};
  run(a);
  run(b);
  for (const char* f : {"single_analytic.csv", "single_engine.csv", "single_simulate.csv", "report.txt"}) {
    EXPECT_EQ(slurp(a.output_dir / f), slurp(b.output_dir / f)) << f;
  }
  EXPECT_FALSE(slurp(a.output_dir / "single_simulate.csv").empty());
  std::filesystem::remove_all(a.output_dir);
  std::filesystem::remove_all(b.output_dir);
}

TEST(Run, DifferentSeedChangesSimulation) {
  auto a = small_simulation("seed_a");
  auto b = small_simulation("seed_b");
  b.sim.seed = 6;
  const auto ra = run(a);
  const auto rb = run(b);
  EXPECT_NE(ra.curves.at(Route::Simulate).values, rb.curves.at(Route::Simulate).values);
  std::filesystem::remove_all(a.output_dir);
  std::filesystem::remove_all(b.output_dir);
}

TEST(Run, PoissonSimulationAgreesWithTheory) {
  auto c = small_simulation("poisson");
  c.routes = {Route::Analytic, Route::Simulate};
  const auto r = run(c);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_EQ(r.reports[0].name, "simulate vs analytic");
  EXPECT_TRUE(r.reports[0].pass) << *r.reports[0].ci_coverage;
  EXPECT_EQ(r.exit_code, 0);
  std::filesystem::remove_all(c.output_dir);
}
