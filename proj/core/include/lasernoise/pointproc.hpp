#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lasernoise/params.hpp"

namespace lasernoise::sim {

using Rng = std::mt19937_64;

struct SimConfig {
  double duration = 2.0e4;  ///< total simulated time, units 1/kappa (warmup included)
  std::uint64_t seed = 1;
  double warmup = 20.0;     ///< discarded initial interval
  double rate_integration_step = 0.01;  ///< longest single step while the pump rate varies
  double detector_efficiency = 1.0;

  void validate(bool feedback_active) const;
};

/// Detection timestamps relative to the end of warmup.
struct EventTrain {
  std::vector<double> times;
  double t_end = 0.0;
  std::string scenario;
  std::uint64_t seed = 0;

  bool operator==(const EventTrain&) const = default;
};

struct TrajectoryState {
  std::uint64_t u = 0;  ///< intracavity photon number
  double i_hat = 0.0;   ///< low-pass filtered photocurrent, events / time
  double t = 0.0;
};

/// Draws the next pump inter-event time from a gamma renewal law with shape
/// 1/(1-p) and mean 1/rate. p = 1 is the deterministic interval, p = 0 exponential.
/// Throws ParameterError for p outside [0, 1] or rate <= 0.
double sample_pump_interval(double p, double rate, Rng& rng);

/// Reusable sampler for a fixed (p, rate); same law as sample_pump_interval.
class PumpIntervalSampler {
 public:
  PumpIntervalSampler(double p, double rate);
  double operator()(Rng& rng);
  double mean() const { return mean_; }

 private:
  enum class Kind { Deterministic, Exponential, Gamma };
  Kind kind_;
  double mean_;
  std::exponential_distribution<double> exponential_;
  std::gamma_distribution<double> gamma_;
};

/// Rates driving the stepping kernel. Unlike LaserParams this admits
/// degenerate values such as kappa = 0, which tests use directly.
struct KernelRates {
  double kappa = 1.0;
  double R = 1.0e4;
  double p = 0.0;
  double lambda = 0.0;               ///< 0 disables feedback
  double filter_bandwidth = 50.0;
  double detector_efficiency = 1.0;
  double max_step = std::numeric_limits<double>::infinity();
};

enum class EventKind { Pump, Loss, Detection, Horizon };

/// Event-driven trajectory of the saturated-regime laser. Pump events add one
/// photon; losses fire at rate kappa * u and are detected with probability eta.
/// With feedback the pump runs in rescaled time against
/// R(t) = R max(0, 1 - lambda (i_hat - i_bar) / i_bar), where i_hat decays at the
/// filter bandwidth between detections and jumps by the bandwidth at each one.
class Trajectory {
 public:
  Trajectory(const KernelRates& rates, TrajectoryState initial, std::uint64_t seed);

  /// Advances to the next event (pump, loss) or to the step horizon, whichever
  /// comes first; the loss/pump race is exact.
  EventKind step();

  /// Current state; i_hat is only tracked while feedback is active.
  TrajectoryState state() const;
  std::uint64_t photons() const { return u_; }
  double time() const { return t_; }
  double clipped_time() const;
  double mean_rate() const { return i_bar_; }

 private:
  void start_segment(double b, double target);
  double pump_deadline(double target) const;

  KernelRates rates_;
  Rng rng_;
  PumpIntervalSampler pump_;
  std::exponential_distribution<double> unit_exp_{1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::uint64_t u_;
  double t_;
  double i_hat_fixed_;   ///< reported i_hat without feedback
  double loss_clock_;    ///< unit-exponential threshold left on the integrated loss rate
  double next_pump_;     ///< absolute time of the next pump event
  double i_bar_;
  bool feedback_;

  // Feedback segment since the last detection. The relative pump rate is
  // max(0, 1 + lambda - b e^{-G (t - seg_t0_)}) with b = lambda i_hat / i_bar at seg_t0_.
  double seg_t0_ = 0.0;
  double seg_b_ = 0.0;
  double seg_origin_ = 0.0;    ///< end of the stretch where the rate is clipped at 0
  double seg_b_origin_ = 0.0;  ///< b e^{-G (seg_origin_ - seg_t0_)}
  double seg_target_ = 0.0;    ///< rate integral from seg_origin_ at which the next pump fires
  double clipped_time_ = 0.0;  ///< clipped time of completed segments
};

struct SimDiagnostics {
  double mean_u = 0.0;
  double detection_rate = 0.0;
  double clip_fraction = 0.0;
  std::uint64_t pump_events = 0;
  std::uint64_t detections = 0;
  std::vector<std::string> warnings;
};

using DetectionSink = std::function<void(double)>;

/// Runs one trajectory and streams detection times (relative to the end of
/// warmup) into `sink`. Throws ParameterError for p outside [0, 1] or invalid config.
SimDiagnostics simulate(const LaserParams& laser, const std::optional<FeedbackParams>& fbl, const SimConfig& cfg,
                        const DetectionSink& sink);

struct SimResult {
  EventTrain train;
  SimDiagnostics diagnostics;
};

/// Same as the streaming overload but collects the whole train in memory.
SimResult simulate(const LaserParams& laser, const std::optional<FeedbackParams>& fbl, const SimConfig& cfg);

/// Text serialization: '#'-prefixed header lines (scenario, seed, t_end, count),
/// then one timestamp per line with 17 significant digits.
void write_event_train(std::ostream& os, const EventTrain& train);
EventTrain read_event_train(std::istream& is);

}  // namespace lasernoise::sim
