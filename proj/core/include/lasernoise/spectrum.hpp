#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lasernoise {

/// Shot-normalized photocurrent spectrum (delta i^2)_omega / i_bar sampled on omega >= 0.
/// Frequencies are in units of kappa.
struct SpectrumCurve {
  std::vector<double> omega;
  std::vector<double> values;
  std::vector<double> ci_low;   ///< empty when the curve carries no confidence band
  std::vector<double> ci_high;
  std::string label;
  std::vector<std::pair<std::string, std::string>> meta;  ///< parameter echo, in insertion order

  std::size_t size() const { return omega.size(); }
  bool has_ci() const { return !ci_low.empty(); }

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
  std::optional<std::string> find_meta(const std::string& key) const;

  /// Throws std::invalid_argument when omega is not strictly increasing and finite,
  /// a value is non-finite, or the CI columns have the wrong length.
  void validate() const;

  bool operator==(const SpectrumCurve&) const = default;
};

/// n points evenly spaced on [lo, hi].
std::vector<double> linear_grid(std::size_t n, double lo, double hi);

/// n points logarithmically spaced on [lo, hi], optionally preceded by omega = 0.
std::vector<double> log_grid(std::size_t n, double lo, double hi, bool include_zero);

/// 512 log-spaced points on [1e-2, 1e2] plus omega = 0.
std::vector<double> default_grid();

/// Parses "n,lo,hi". lo == 0 gives a linear grid, lo > 0 a log grid with omega = 0 prepended.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace lasernoise
