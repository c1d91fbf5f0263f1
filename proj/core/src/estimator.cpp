#include "lasernoise/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <fftw3.h>

#include "lasernoise/curve_io.hpp"
#include "lasernoise/errors.hpp"

namespace lasernoise::estimator {

namespace {

// FFTW planning is not thread-safe; plan execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void execute() { fftw_execute(plan_); }
  double power(std::size_t j) const { return out_[j][0] * out_[j][0] + out_[j][1] * out_[j][1]; }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::vector<double> make_window(std::size_t n, Window w) {
  std::vector<double> out(n, 1.0);
  if (w == Window::Hann) {
    // Periodic Hann: its DFT is non-zero only at bins 0 and +-1.
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }
  }
  return out;
}

std::size_t hop_of(const WelchConfig& cfg) {
  const auto hop = static_cast<std::size_t>(std::llround(static_cast<double>(cfg.segment_length) * (1.0 - cfg.overlap)));
  return std::max<std::size_t>(hop, 1);
}

double sinc2(double x) {
  if (std::abs(x) < 1e-8) return 1.0;
  const double s = std::sin(x) / x;
  return s * s;
}

}  // namespace

std::uint64_t BinnedCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

CountBinner::CountBinner(double dt, double t0, double t_end) : t_end_(t_end) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw EstimationError("bin width must be finite and > 0");
  if (!(t_end > t0)) throw EstimationError("binning range must have t_end > t0");
  bins_.dt = dt;
  bins_.t0 = t0;
  const auto n = static_cast<std::size_t>(std::ceil((t_end - t0) / dt - 1e-9));
  bins_.counts.assign(std::max<std::size_t>(n, 1), 0);
}

void CountBinner::add(double t) {
  if (t < bins_.t0 || t > t_end_) return;
  auto k = static_cast<std::size_t>((t - bins_.t0) / bins_.dt);
  // The quotient can round across an edge; the edges themselves are t0 + k dt.
  if (k > 0 && bins_.t0 + static_cast<double>(k) * bins_.dt > t) --k;
  else if (bins_.t0 + static_cast<double>(k + 1) * bins_.dt <= t) ++k;
  if (k >= bins_.counts.size()) k = bins_.counts.size() - 1;
  ++bins_.counts[k];
  ++accepted_;
}

BinnedCounts CountBinner::release() && { return std::move(bins_); }

BinnedCounts bin_events(const sim::EventTrain& train, double dt, double t0) {
  if (train.times.empty()) throw EstimationError("cannot bin an empty event train");
  if (!(dt > 0.0) || dt > kMaxBinWidth) {
    throw EstimationError("bin width must lie in (0, pi/20]: the analysis band must reach 20 kappa below Nyquist");
  }
  const double t_end = std::max(train.t_end, train.times.back());
  CountBinner binner(dt, t0, t_end);
  for (double t : train.times) binner.add(t);
  return std::move(binner).release();
}

void WelchConfig::validate() const {
  if (segment_length < 64 || (segment_length & (segment_length - 1)) != 0) {
    throw EstimationError("segment_length must be a power of two >= 64");
  }
  if (!(overlap >= 0.0 && overlap <= 0.5)) throw EstimationError("overlap must lie in [0, 0.5]");
  if (min_segments < 1) throw EstimationError("min_segments must be >= 1");
  if (!(band_lo > 0.0) || !(band_hi > band_lo)) throw EstimationError("analysis band needs 0 < band_lo < band_hi");
  if (!(confidence > 0.0 && confidence < 1.0)) throw EstimationError("confidence must lie in (0, 1)");
}

double degrees_of_freedom(std::size_t segments, std::size_t bins_averaged, const WelchConfig& cfg) {
  const std::size_t L = cfg.segment_length;
  const std::size_t hop = hop_of(cfg);
  const auto w = make_window(L, cfg.window);
  double U = 0.0;
  for (double v : w) U += v * v;

  // Welch: periodograms of segments l apart are correlated by rho_l = (sum w_k w_{k+l hop})^2 / U^2.
  const double K = static_cast<double>(segments);
  double seg_sum = 0.0;
  for (std::size_t l = 1; l < segments && l * hop < L; ++l) {
    double c = 0.0;
    for (std::size_t k = 0; k + l * hop < L; ++k) c += w[k] * w[k + l * hop];
    seg_sum += (K - static_cast<double>(l)) * (c / U) * (c / U);
  }
  const double k_eff = K * K / (K + 2.0 * seg_sum);

  // Neighbouring frequency bins of one windowed periodogram are correlated by
  // |DFT(w^2)_d|^2 / U^2.
  const double m = static_cast<double>(bins_averaged);
  double bin_sum = 0.0;
  for (std::size_t d = 1; d < bins_averaged; ++d) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(d * k % L) / static_cast<double>(L);
      acc += w[k] * w[k] * std::polar(1.0, phase);
    }
    const double r = std::norm(acc) / (U * U);
    if (r < 1e-12) break;  // window DFTs are compact; farther lags vanish
    bin_sum += (m - static_cast<double>(d)) * r;
  }
  const double m_eff = m * m / (m + 2.0 * bin_sum);
  return 2.0 * k_eff * m_eff;
}

SpectrumCurve estimate_spectrum(const BinnedCounts& counts, const WelchConfig& cfg) {
  cfg.validate();
  if (!(counts.dt > 0.0)) throw EstimationError("bin width must be > 0");
  const std::size_t N = counts.counts.size();
  const std::size_t L = cfg.segment_length;
  const std::size_t hop = hop_of(cfg);
  if (N < L) throw EstimationError("fewer bins than one segment");
  const std::size_t K = 1 + (N - L) / hop;
  if (K < cfg.min_segments) {
    throw EstimationError("only " + std::to_string(K) + " segments, need at least " + std::to_string(cfg.min_segments));
  }
  const double cbar = static_cast<double>(counts.total()) / static_cast<double>(N);
  if (!(cbar > 0.0)) throw EstimationError("mean count per bin is zero");

  const auto w = make_window(L, cfg.window);
  double U = 0.0;
  for (double v : w) U += v * v;

  const std::size_t half = L / 2;
  std::vector<double> acc(half + 1, 0.0);
  RealFft fft(L);
  for (std::size_t s = 0; s < K; ++s) {
    const auto* seg = counts.counts.data() + s * hop;
    double mean = 0.0;
    for (std::size_t k = 0; k < L; ++k) mean += seg[k];
    mean /= static_cast<double>(L);
    double* in = fft.input();
    for (std::size_t k = 0; k < L; ++k) in[k] = (static_cast<double>(seg[k]) - mean) * w[k];
    fft.execute();
    for (std::size_t j = 0; j <= half; ++j) acc[j] += fft.power(j);
  }
  // Poisson counts have variance cbar per bin, so E[acc_j] = K U cbar for a
  // homogeneous Poisson train: this normalization pins the shot floor at 1.
  const double norm = static_cast<double>(K) * U * cbar;

  const double dt = counts.dt;
  const double d_omega = 2.0 * std::numbers::pi / (static_cast<double>(L) * dt);
  const double hi = std::min(cfg.band_hi, std::numbers::pi / (2.0 * dt));
  const double lo = cfg.band_lo;
  // Mean subtraction removes the window's own DFT support: bin 0, plus bin 1 for Hann.
  const std::size_t j_min = cfg.window == Window::Hann ? 2 : 1;

  struct Band {
    double omega_sum = 0.0;
    double power_sum = 0.0;
    std::size_t bins = 0;
  };
  std::vector<Band> bands;
  std::vector<double> edges;
  if (cfg.bands > 0) {
    bands.resize(cfg.bands);
    edges = log_grid(cfg.bands + 1, lo, hi, false);
  }
  for (std::size_t j = j_min; j <= half; ++j) {
    const double omega = d_omega * static_cast<double>(j);
    if (omega < lo || omega > hi) continue;
    const double power = acc[j] / norm;
    if (cfg.bands == 0) {
      bands.push_back({omega, power, 1});
      continue;
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), omega);
    auto b = static_cast<std::size_t>(std::distance(edges.begin(), it));
    b = std::clamp<std::size_t>(b, 1, cfg.bands) - 1;
    bands[b].omega_sum += omega;
    bands[b].power_sum += power;
    ++bands[b].bins;
  }

  SpectrumCurve out;
  out.label = "estimate";
  const double alpha = 1.0 - cfg.confidence;
  for (const Band& band : bands) {
    if (band.bins == 0) continue;
    const double m = static_cast<double>(band.bins);
    const double omega = band.omega_sum / m;
    const double raw = band.power_sum / m;
    const double dof = degrees_of_freedom(K, band.bins, cfg);
    const boost::math::chi_squared chi2(dof);
    const double raw_lo = raw * dof / boost::math::quantile(chi2, 1.0 - alpha / 2.0);
    const double raw_hi = raw * dof / boost::math::quantile(chi2, alpha / 2.0);
    // Bin integration attenuates only the excess over the (exactly white) shot floor.
    const double g = sinc2(0.5 * omega * dt);
    auto correct = [g](double v) { return 1.0 + (v - 1.0) / g; };
    out.omega.push_back(omega);
    out.values.push_back(correct(raw));
    out.ci_low.push_back(correct(raw_lo));
    out.ci_high.push_back(correct(raw_hi));
  }
  if (out.omega.empty()) throw EstimationError("no frequency bins inside the analysis band");

  out.add_meta("segments", std::to_string(K));
  out.add_meta("segment_length", std::to_string(L));
  out.add_meta("bin_width", io::format_number(dt));
  out.add_meta("mean_count", io::format_number(cbar));
  out.add_meta("window", cfg.window == Window::Hann ? "hann" : "rectangular");
  out.validate();
  return out;
}

SpectrumCurve merge_trajectories(std::span<const SpectrumCurve> curves) {
  if (curves.empty()) throw EstimationError("nothing to merge");
  if (curves.size() == 1) return curves.front();
  const SpectrumCurve& first = curves.front();
  for (const auto& c : curves) {
    if (c.omega != first.omega) throw EstimationError("cannot merge curves on different grids");
    if (!c.has_ci()) throw EstimationError("merging needs confidence intervals on every curve");
  }

  SpectrumCurve out;
  out.label = first.label;
  out.meta = first.meta;
  out.add_meta("merged", std::to_string(curves.size()));
  out.omega = first.omega;
  const std::size_t n = first.size();
  out.values.resize(n);
  out.ci_low.resize(n);
  out.ci_high.resize(n);

  for (std::size_t j = 0; j < n; ++j) {
    bool positive = true;
    double plain = 0.0;
    for (const auto& c : curves) {
      positive = positive && c.values[j] > 0.0 && c.ci_low[j] < c.values[j] && c.ci_high[j] > c.values[j];
      plain += c.values[j];
    }
    plain /= static_cast<double>(curves.size());

    // Chi-squared CIs scale with the estimate, so variances are taken relative
    // to the estimate. This keeps equal-length trajectories equally weighted
    // instead of favouring the ones that fluctuated low.
    double wsum = 0.0, vsum = 0.0, inv_lo = 0.0, inv_hi = 0.0;
    for (const auto& c : curves) {
      const double scale = positive ? c.values[j] : 1.0;
      const double lo = (c.values[j] - c.ci_low[j]) / scale;
      const double hi = (c.ci_high[j] - c.values[j]) / scale;
      const double sigma = 0.5 * (lo + hi);
      const double weight = sigma > 0.0 ? 1.0 / (sigma * sigma) : 0.0;
      wsum += weight;
      vsum += weight * c.values[j];
      inv_lo += lo > 0.0 ? 1.0 / (lo * lo) : 0.0;
      inv_hi += hi > 0.0 ? 1.0 / (hi * hi) : 0.0;
    }
    const double v = wsum > 0.0 ? vsum / wsum : plain;
    const double scale = positive ? v : 1.0;
    out.values[j] = v;
    out.ci_low[j] = v - (inv_lo > 0.0 ? scale / std::sqrt(inv_lo) : 0.0);
    out.ci_high[j] = v + (inv_hi > 0.0 ? scale / std::sqrt(inv_hi) : 0.0);
  }
  out.validate();
  return out;
}

}  // namespace lasernoise::estimator
