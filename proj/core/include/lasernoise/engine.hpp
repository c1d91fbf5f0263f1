#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "lasernoise/params.hpp"
#include "lasernoise/spectrum.hpp"

namespace lasernoise::engine {

/// Linear Langevin system in the frequency domain:
///
///   (-i w Id + M) x(w) = L f(w),   <f_j(w) f_k(w')> = C_jk delta(w + w'),
///   observed current    y(w) = a x(w) + b f(w).
///
/// C is real symmetric and may be indefinite (c-number sources of
/// sub-Poissonian pumps carry negative variance). Spectra are divided by
/// shot_level, the mean photocurrent of the observed detector.
class LinearNoiseModel {
 public:
  /// Throws ModelError on shape mismatch, non-finite entries, asymmetric C,
  /// shot_level <= 0, or an eigenvalue of M with non-positive real part.
  /// `label` is echoed in error messages.
  LinearNoiseModel(Eigen::MatrixXd M, Eigen::MatrixXd L, Eigen::MatrixXd C, Eigen::RowVectorXd a,
                   Eigen::RowVectorXd b, double shot_level, std::string label = "custom");

  const Eigen::MatrixXd& drift() const { return M_; }
  const Eigen::MatrixXd& input() const { return L_; }
  const Eigen::MatrixXd& correlation() const { return C_; }
  const Eigen::RowVectorXd& observable() const { return a_; }
  const Eigen::RowVectorXd& feedthrough() const { return b_; }
  double shot_level() const { return shot_level_; }
  const std::string& label() const { return label_; }

  Eigen::Index states() const { return M_.rows(); }
  Eigen::Index sources() const { return L_.cols(); }

 private:
  Eigen::MatrixXd M_;
  Eigen::MatrixXd L_;
  Eigen::MatrixXd C_;
  Eigen::RowVectorXd a_;
  Eigen::RowVectorXd b_;
  double shot_level_;
  std::string label_;
};

enum class Detector { Exciting, Measuring };

struct Single {
  double p = 0.0;
};

/// filter_bandwidth unset: instantaneous feedback. Set: the feedback acts
/// through a single-pole low-pass of the detected current, as in the Monte
/// Carlo route.
struct Fbl {
  double p = 0.0;
  double lambda = 0.0;
  std::optional<double> filter_bandwidth;
};

struct Coupled {
  double p = 0.0;
  double kappa = 1.0;
  double kappa_tilde = 1.0;
  double kappa0 = 0.0;
};

struct CoupledFbl {
  double p = 0.0;
  double lambda = 0.0;
  double kappa = 1.0;
  double kappa_tilde = 1.0;
  double kappa0 = 0.0;
};

struct ScenarioSpec {
  std::variant<Single, Fbl, Coupled, CoupledFbl> system;
  Detector detector = Detector::Measuring;  ///< ignored by the single-laser systems
};

std::string describe(const ScenarioSpec& spec);

/// Exact matrices for each scenario at the given operating point. For the
/// single-laser systems `steady.n` and the kappa of the steady state are
/// used; kappa is recovered as i_bar / n.
LinearNoiseModel build_model(const ScenarioSpec& spec, const SteadyState& steady);

/// Complex response row v(w) = a (-i w Id + M)^-1 L + b.
Eigen::RowVectorXcd response(const LinearNoiseModel& model, double omega);

/// Re[v C v^H] / shot_level.
double psd_at(const LinearNoiseModel& model, double omega);

/// psd_at over the grid. Negative values are kept but flagged with a
/// "warning" meta entry.
SpectrumCurve psd_curve(const LinearNoiseModel& model, std::span<const double> omega_grid);

}  // namespace lasernoise::engine
