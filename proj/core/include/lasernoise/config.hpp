#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lasernoise/estimator.hpp"
#include "lasernoise/params.hpp"
#include "lasernoise/pointproc.hpp"

namespace lasernoise {

/// Invalid experiment configuration. `line` is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::size_t line, std::string field, const std::string& message);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string field_;
};

enum class ScenarioKind { Single, Fbl, Coupled, CoupledFbl };
enum class Route { Analytic, Engine, Simulate };

std::string to_string(ScenarioKind kind);
std::string to_string(Route route);

/// Frequency grid for the analytic and engine routes. lo == 0: linear on [0, hi];
/// lo > 0: log-spaced on [lo, hi] with omega = 0 prepended.
struct GridSpec {
  std::size_t points = 512;
  double lo = 1.0e-2;
  double hi = 1.0e2;

  std::vector<double> build() const;
  static GridSpec parse(const std::string& text);  ///< "n,lo,hi"
};

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::Single;
  double p = 0.0;
  double lambda = 0.0;
  double kappa0_over_kappa = 0.0;
  double R_over_kappa = 1.0e4;
  std::vector<Route> routes{Route::Analytic, Route::Engine};

  LaserParams laser;  ///< kappa = 1; R and p mirror the scenario block
  std::optional<ThreeLevelParams> three_level;

  GridSpec grid;

  sim::SimConfig sim;
  std::size_t trajectories = 8;
  double filter_bandwidth = 50.0;
  double bin_width = 1.0 / 32.0;
  estimator::WelchConfig welch{.bands = 80};

  double tolerance_abs = 1.0e-15;  ///< absorbs rounding where a closed form is exactly 0
  double tolerance_rel = 1.0e-9;
  double mc_coverage = 0.9;
  double limit_tolerance = 0.05;
  double intermediate_p_band = 0.5;  ///< highest frequency checked when 0 < p < 1

  std::filesystem::path output_dir = "out";

  bool has_route(Route r) const;
  bool feedback() const { return scenario == ScenarioKind::Fbl || scenario == ScenarioKind::CoupledFbl; }
  bool coupled() const { return scenario == ScenarioKind::Coupled || scenario == ScenarioKind::CoupledFbl; }

  /// Cross-field rules: simulate only for single/fbl with p in [0, 1], coupled
  /// scenarios need kappa0_over_kappa > 0, the coupled-fbl closed form needs p = 0.
  void validate(const std::string& source = "<config>") const;
};

/// Parses the sectioned key = value format. Unknown sections or keys, malformed
/// numbers and duplicate keys are rejected with the offending line.
ExperimentConfig parse_config(std::istream& is, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form of a configuration; parse_config(serialize_config(c)) == c field-wise.
std::string serialize_config(const ExperimentConfig& cfg);

/// Applies "key=value" for a scenario parameter (p, lambda, kappa0_over_kappa, R_over_kappa)
/// or any "section.key=value" pair; used by sweeps. Malformed values and unknown keys throw
/// ConfigError; cross-field rules are left to validate() so overrides can be applied in any order.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

}  // namespace lasernoise
