#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lasernoise/pointproc.hpp"
#include "lasernoise/spectrum.hpp"

namespace lasernoise::estimator {

struct BinnedCounts {
  std::vector<std::uint32_t> counts;
  double dt = 0.0;
  double t0 = 0.0;

  std::uint64_t total() const;
};

/// Incremental binner for streamed, time-ordered events on [t0, t_end].
class CountBinner {
 public:
  CountBinner(double dt, double t0, double t_end);

  /// Events outside [t0, t_end] are ignored. An event exactly at t_end lands in the last bin.
  void add(double t);
  std::uint64_t accepted() const { return accepted_; }
  BinnedCounts release() &&;
  const BinnedCounts& counts() const { return bins_; }

 private:
  BinnedCounts bins_;
  double t_end_;
  std::uint64_t accepted_ = 0;
};

/// Largest admissible bin width: puts Nyquist at 20 kappa.
inline constexpr double kMaxBinWidth = 3.14159265358979323846 / 20.0;

/// counts[k] = #events in [t0 + k dt, t0 + (k+1) dt). Throws EstimationError for
/// an empty train or dt outside (0, kMaxBinWidth].
BinnedCounts bin_events(const sim::EventTrain& train, double dt, double t0 = 0.0);

enum class Window { Rectangular, Hann };

struct WelchConfig {
  std::size_t segment_length = 8192;  ///< bins per segment, power of two >= 64
  double overlap = 0.5;               ///< in [0, 0.5]
  Window window = Window::Hann;
  std::size_t min_segments = 64;
  double band_lo = 0.05;              ///< analysis band, units of kappa
  double band_hi = 20.0;              ///< capped at half-Nyquist
  std::size_t bands = 0;              ///< > 0: average FFT bins into this many log-spaced bands
  double confidence = 0.95;

  void validate() const;
};

/// Welch estimate of the shot-normalized spectrum: mean-subtracted, windowed
/// periodograms averaged over segments, normalized so a homogeneous Poisson
/// train has expectation 1 at every frequency. The bin-integration sinc^2
/// attenuation of the excess noise is divided out. CIs come from chi-squared
/// quantiles with the overlap- and window-corrected degrees of freedom.
SpectrumCurve estimate_spectrum(const BinnedCounts& counts, const WelchConfig& cfg);

/// Degrees of freedom of one averaged point: 2 * K_eff * m_eff.
double degrees_of_freedom(std::size_t segments, std::size_t bins_averaged, const WelchConfig& cfg);

/// Inverse-variance weighted mean of curves on identical grids with combined CI.
/// Throws EstimationError on grid mismatch or missing CIs (single curve: identity).
SpectrumCurve merge_trajectories(std::span<const SpectrumCurve> curves);

}  // namespace lasernoise::estimator
