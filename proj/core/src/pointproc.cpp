#include "lasernoise/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "lasernoise/curve_io.hpp"
#include "lasernoise/errors.hpp"

namespace lasernoise::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pump(double p, double rate) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError("pump sampler supports p in [0, 1] only (got " + std::to_string(p) + ")");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ParameterError("pump rate must be finite and > 0");
}

}  // namespace

void SimConfig::validate(bool feedback_active) const {
  if (!std::isfinite(duration) || !std::isfinite(warmup) || !(warmup >= 0.0) || !(duration > warmup)) {
    throw ParameterError("simulation needs duration > warmup >= 0");
  }
  if (!(rate_integration_step > 0.0)) throw ParameterError("rate_integration_step must be > 0");
  if (feedback_active && rate_integration_step > 0.01) {
    throw ParameterError("rate_integration_step must be <= 0.01/kappa when feedback is active");
  }
  if (!(detector_efficiency > 0.0 && detector_efficiency <= 1.0)) {
    throw ParameterError("detector_efficiency must lie in (0, 1]");
  }
}

PumpIntervalSampler::PumpIntervalSampler(double p, double rate) : kind_(Kind::Exponential), mean_(1.0 / rate) {
  check_pump(p, rate);
  if (p == 1.0) {
    kind_ = Kind::Deterministic;
  } else if (p == 0.0) {
    kind_ = Kind::Exponential;
    exponential_ = std::exponential_distribution<double>(rate);
  } else {
    // Shape a = 1/(1-p) gives CV^2 = 1 - p, the long-window count Fano factor.
    kind_ = Kind::Gamma;
    const double shape = 1.0 / (1.0 - p);
    gamma_ = std::gamma_distribution<double>(shape, mean_ / shape);
  }
}

double PumpIntervalSampler::operator()(Rng& rng) {
  switch (kind_) {
    case Kind::Deterministic:
      return mean_;
    case Kind::Exponential:
      return exponential_(rng);
    case Kind::Gamma:
      return gamma_(rng);
  }
  return mean_;
}

double sample_pump_interval(double p, double rate, Rng& rng) { return PumpIntervalSampler(p, rate)(rng); }

Trajectory::Trajectory(const KernelRates& rates, TrajectoryState initial, std::uint64_t seed)
    : rates_(rates),
      rng_(seed),
      pump_(rates.p, rates.R),
      u_(initial.u),
      t_(initial.t),
      i_hat_fixed_(initial.i_hat),
      loss_clock_(0.0),
      next_pump_(0.0),
      i_bar_(rates.detector_efficiency * rates.R),
      feedback_(rates.lambda > 0.0) {
  if (!(rates.kappa >= 0.0)) throw ParameterError("kappa must be >= 0");
  if (feedback_ && !(rates.filter_bandwidth > 0.0)) throw ParameterError("filter_bandwidth must be > 0");
  if (!(rates.max_step > 0.0)) throw ParameterError("max_step must be > 0");
  loss_clock_ = unit_exp_(rng_);
  const double first = pump_(rng_);
  if (feedback_) {
    start_segment(rates_.lambda * initial.i_hat / i_bar_, first);
  } else {
    next_pump_ = t_ + first;
  }
}

TrajectoryState Trajectory::state() const {
  TrajectoryState s;
  s.u = u_;
  s.t = t_;
  s.i_hat = feedback_ ? seg_b_ * std::exp(-rates_.filter_bandwidth * (t_ - seg_t0_)) * i_bar_ / rates_.lambda
                      : i_hat_fixed_;
  return s;
}

double Trajectory::clipped_time() const {
  if (!feedback_) return 0.0;
  return clipped_time_ + std::clamp(t_ - seg_t0_, 0.0, seg_origin_ - seg_t0_);
}

void Trajectory::start_segment(double b, double target) {
  const double A = 1.0 + rates_.lambda;
  seg_t0_ = t_;
  seg_b_ = b;
  if (b > A) {
    seg_origin_ = t_ + std::log(b / A) / rates_.filter_bandwidth;
    seg_b_origin_ = A;
  } else {
    seg_origin_ = t_;
    seg_b_origin_ = b;
  }
  seg_target_ = target;
  next_pump_ = pump_deadline(target);
}

// Solves A d + b (e^{-G d} - 1) / G = target for d >= 0, the rate integral
// measured from the segment origin, and returns seg_origin_ + d.
double Trajectory::pump_deadline(double target) const {
  if (!(target > 0.0)) return std::max(seg_origin_, t_);
  const double A = 1.0 + rates_.lambda;
  const double G = rates_.filter_bandwidth;
  const double b = seg_b_origin_;
  // Root of the quadratic Taylor expansion. The third derivative is negative,
  // so this starts at or left of the root; Newton then converges from the right.
  const double a1 = A - b;
  const double a2 = 0.5 * b * G;
  double d = 2.0 * target / (a1 + std::sqrt(a1 * a1 + 4.0 * a2 * target));
  for (int it = 0; it < 100; ++it) {
    const double m = std::expm1(-G * d);
    const double excess = A * d + b * m / G - target;
    const double rate = A - b * (1.0 + m);
    if (!(rate > 0.0)) break;
    const double step = excess / rate;
    d = std::max(0.0, d - step);
    // The next Newton error is about (curvature / 2 rate) step^2; stop once it
    // drops below the resolution of the absolute clock.
    if (0.5 * b * G * (1.0 + m) / rate * step * step <= 1e-16 * (seg_origin_ + d)) break;
  }
  return seg_origin_ + d;
}

EventKind Trajectory::step() {
  const double loss_rate = rates_.kappa * static_cast<double>(u_);
  const double t_loss = loss_rate > 0.0 ? t_ + loss_clock_ / loss_rate : kInf;
  const double t_cap = t_ + rates_.max_step;

  auto advance = [&](double t_next) {
    loss_clock_ = std::max(0.0, loss_clock_ - loss_rate * (t_next - t_));
    t_ = t_next;
  };

  if (next_pump_ <= t_loss && next_pump_ <= t_cap) {
    advance(next_pump_);
    ++u_;
    LASERNOISE_ENSURE(u_ < 1000000000ULL, "photon number overflow");
    const double interval = pump_(rng_);
    if (feedback_) {
      seg_target_ += interval;
      next_pump_ = pump_deadline(seg_target_);
    } else {
      next_pump_ += interval;
    }
    return EventKind::Pump;
  }
  if (t_cap < t_loss) {
    advance(t_cap);
    return EventKind::Horizon;
  }

  t_ = t_loss;
  loss_clock_ = unit_exp_(rng_);
  --u_;
  if (rates_.detector_efficiency < 1.0 && unit_(rng_) >= rates_.detector_efficiency) return EventKind::Loss;
  if (feedback_) {
    const double A = 1.0 + rates_.lambda;
    const double G = rates_.filter_bandwidth;
    const double d = t_ - seg_origin_;
    double b_now = 0.0;
    double used = 0.0;
    if (d > 0.0) {
      const double m = std::expm1(-G * d);
      b_now = seg_b_origin_ * (1.0 + m);
      used = A * d + seg_b_origin_ * m / G;
      clipped_time_ += seg_origin_ - seg_t0_;
    } else {
      b_now = seg_b_ * std::exp(-G * (t_ - seg_t0_));
      clipped_time_ += t_ - seg_t0_;
    }
    // Each detection raises the filtered current i_hat by G.
    start_segment(b_now + rates_.lambda * G / i_bar_, seg_target_ - used);
  }
  return EventKind::Detection;
}

SimDiagnostics simulate(const LaserParams& laser, const std::optional<FeedbackParams>& fbl, const SimConfig& cfg,
                        const DetectionSink& sink) {
  laser.validate();
  check_pump(laser.p, laser.R);
  if (fbl) fbl->validate();
  const bool feedback = fbl && fbl->lambda > 0.0;
  cfg.validate(feedback);

  SimDiagnostics diag;
  if (laser.R / laser.kappa < 1.0e3) {
    diag.warnings.push_back("R/kappa = " + io::format_number(laser.R / laser.kappa) +
                            " < 1e3: linearization around the steady state is weak");
  }

  KernelRates rates;
  rates.kappa = laser.kappa;
  rates.R = laser.R;
  rates.p = laser.p;
  rates.lambda = feedback ? fbl->lambda : 0.0;
  rates.filter_bandwidth = fbl ? fbl->filter_bandwidth : 50.0;
  rates.detector_efficiency = cfg.detector_efficiency;
  rates.max_step = feedback ? cfg.rate_integration_step : kInf;

  TrajectoryState init;
  init.u = static_cast<std::uint64_t>(std::llround(laser.R / laser.kappa));
  init.i_hat = cfg.detector_efficiency * laser.R;
  Trajectory traj(rates, init, cfg.seed);

  const double t_lo = cfg.warmup;
  const double t_hi = cfg.duration;
  double u_integral = 0.0;
  double clipped_at_warmup = 0.0;
  bool past_warmup = false;

  while (true) {
    const double t_prev = traj.time();
    const double u_prev = static_cast<double>(traj.photons());
    const EventKind kind = traj.step();
    const double t = traj.time();

    const double a = std::max(t_prev, t_lo);
    const double b = std::min(t, t_hi);
    if (b > a) u_integral += u_prev * (b - a);
    if (!past_warmup && t >= t_lo) {
      past_warmup = true;
      clipped_at_warmup = traj.clipped_time();
    }
    if (t > t_hi) break;
    if (t < t_lo) continue;
    if (kind == EventKind::Detection) {
      ++diag.detections;
      sink(t - t_lo);
    } else if (kind == EventKind::Pump) {
      ++diag.pump_events;
    }
  }

  const double span = t_hi - t_lo;
  diag.mean_u = u_integral / span;
  diag.detection_rate = static_cast<double>(diag.detections) / span;
  diag.clip_fraction = std::clamp((traj.clipped_time() - clipped_at_warmup) / span, 0.0, 1.0);
  if (diag.clip_fraction > 0.01) {
    diag.warnings.push_back("pump rate clipped at 0 for " + io::format_number(100.0 * diag.clip_fraction) +
                            "% of the time: linear feedback model violated");
  }
  return diag;
}

SimResult simulate(const LaserParams& laser, const std::optional<FeedbackParams>& fbl, const SimConfig& cfg) {
  SimResult out;
  out.train.t_end = cfg.duration - cfg.warmup;
  out.train.seed = cfg.seed;
  std::ostringstream sc;
  sc << (fbl && fbl->lambda > 0.0 ? "fbl" : "single") << " p=" << io::format_number(laser.p)
     << " R=" << io::format_number(laser.R) << " kappa=" << io::format_number(laser.kappa);
  if (fbl) sc << " lambda=" << io::format_number(fbl->lambda) << " filter_bandwidth=" << io::format_number(fbl->filter_bandwidth);
  out.train.scenario = sc.str();
  out.train.times.reserve(static_cast<std::size_t>(laser.R * cfg.detector_efficiency * out.train.t_end * 1.01) + 16);
  out.diagnostics = simulate(laser, fbl, cfg, [&](double t) { out.train.times.push_back(t); });
  return out;
}

void write_event_train(std::ostream& os, const EventTrain& train) {
  os << "# lasernoise events\n";
  os << "# scenario: " << train.scenario << '\n';
  os << "# seed: " << train.seed << '\n';
  os << "# t_end: " << io::format_number(train.t_end) << '\n';
  os << "# count: " << train.times.size() << '\n';
  for (double t : train.times) os << io::format_number(t) << '\n';
}

EventTrain read_event_train(std::istream& is) {
  EventTrain train;
  std::string line;
  std::size_t declared = 0;
  bool have_count = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      key.erase(0, key.find_first_not_of(' '));
      std::string value = line.substr(colon + 1);
      value.erase(0, value.find_first_not_of(' '));
      if (key == "scenario") train.scenario = value;
      else if (key == "seed") train.seed = std::stoull(value);
      else if (key == "t_end") train.t_end = std::stod(value);
      else if (key == "count") {
        declared = std::stoull(value);
        have_count = true;
      }
      continue;
    }
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw std::runtime_error("event train: bad timestamp on line " + std::to_string(lineno));
    if (!train.times.empty() && !(t > train.times.back())) {
      throw std::runtime_error("event train: timestamps not strictly increasing at line " + std::to_string(lineno));
    }
    train.times.push_back(t);
  }
  if (have_count && declared != train.times.size()) throw std::runtime_error("event train: count mismatch");
  for (double t : train.times) {
    if (t < 0.0 || t > train.t_end) throw std::runtime_error("event train: timestamp outside [0, t_end]");
  }
  return train;
}

}  // namespace lasernoise::sim
