#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lasernoise/config.hpp"
#include "lasernoise/pointproc.hpp"
#include "lasernoise/spectrum.hpp"

namespace lasernoise {

struct CompareReport {
  std::string name;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double omega_worst = 0.0;
  std::optional<double> ci_coverage;  ///< set for CI-aware comparisons
  double tolerance_abs = 0.0;
  double tolerance_rel = 0.0;
  double required_coverage = 0.0;
  std::size_t points = 0;
  bool gating = true;  ///< false: informational, does not affect the exit code
  bool pass = false;
  std::vector<std::string> notes;
};

/// Pointwise comparison of `a` against reference `b` on identical grids.
/// Without CIs on `a`: pass iff |a - b| <= tol_abs + tol_rel |b| everywhere.
/// With CIs on `a`: pass iff b lies inside [ci_low, ci_high] at >= `coverage` of the points.
/// Throws std::invalid_argument on grid mismatch.
CompareReport compare(const SpectrumCurve& a, const SpectrumCurve& b, double tolerance_abs, double tolerance_rel,
                      double coverage = 0.9);

struct SimulationOutcome {
  SpectrumCurve curve;  ///< merged over trajectories
  std::vector<sim::SimDiagnostics> diagnostics;
};

SpectrumCurve analytic_route(const ExperimentConfig& cfg, const std::vector<double>& grid);
/// filter_bandwidth set: the causal-loop model matching the Monte Carlo feedback.
SpectrumCurve engine_route(const ExperimentConfig& cfg, const std::vector<double>& grid,
                           std::optional<double> filter_bandwidth = std::nullopt);
/// Runs cfg.trajectories seeds (seed, seed+1, ...) concurrently and merges them.
SimulationOutcome simulate_route(const ExperimentConfig& cfg);

struct RunResult {
  std::map<Route, SpectrumCurve> curves;
  std::vector<CompareReport> reports;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> files;
  int exit_code = 0;  ///< 0 all gating comparisons pass, 1 otherwise
};

/// Runs every enabled route, writes <scenario>_<route>.csv/.dat and report.txt into
/// cfg.output_dir, and compares routes.
RunResult run(const ExperimentConfig& cfg);

void write_report(std::ostream& os, const ExperimentConfig& cfg, const RunResult& result);

}  // namespace lasernoise
