#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lasernoise {

/// Two-level laser constants. All rates in 1/time; the CLI works in units of kappa.
struct LaserParams {
  double kappa = 1.0;       ///< mode spectral width
  double R = 1.0e4;         ///< mean pump rate
  double p = 0.0;           ///< pump statistics: 1 regular, 0 Poissonian, < 0 super-Poissonian
  double beta_inv = 1.0e2;  ///< saturation photon number gamma_perp * gamma1 / (2 g^2)
  double gamma1 = 1.0e2;
  double gamma2 = 2.0e3;
  double gamma_perp = 1.0e3;
  std::optional<double> g;  ///< dipole coupling; when set, beta_inv must agree with it

  /// Throws ParameterError when an invariant is broken.
  void validate() const;
};

struct FeedbackParams {
  double lambda = 0.0;             ///< feedback efficiency
  double filter_bandwidth = 50.0;  ///< low-pass bandwidth of the feedback photocurrent (simulation only)

  void validate() const;
};

/// Three-level "measuring" medium.
struct ThreeLevelParams {
  double kappa_tilde = 1.0;
  double gamma2_tilde = 1.0;
  double gamma1_tilde = 10.0;
  double g13_over_g12 = 1.0;
  double N_tilde = 1.0;

  void validate() const;
  /// Non-fatal diagnostics, e.g. gamma2_tilde not well below gamma1_tilde.
  std::vector<std::string> warnings() const;
  /// Lumped constant gamma2_tilde * (g13/g12)^2 * N_tilde.
  double pump_constant() const { return gamma2_tilde * g13_over_g12 * g13_over_g12 * N_tilde; }
};

struct CouplingParams {
  double kappa0 = 0.0;       ///< coherent-pump rate of the three-level medium
  double kappa_tilde = 1.0;  ///< measuring-laser mode width
  double x = 0.0;            ///< kappa0 / kappa

  /// Builds a coupling with x derived from kappa.
  static CouplingParams make(double kappa0, double kappa_tilde, double kappa);
  void validate(double kappa) const;
};

struct SteadyState {
  double n = 0.0;        ///< exciting-laser photon number
  double n_tilde = 0.0;  ///< measuring-laser photon number
  double I = 0.0;        ///< dimensionless power beta * n
  double N1_bar = 0.0;
  double N2_bar = 0.0;
  double gP_bar = 0.0;   ///< g * <alpha* P>
  double i_bar = 0.0;    ///< kappa * n
  double i_tilde_bar = 0.0;
  std::vector<std::string> warnings;

  bool has_warnings() const { return !warnings.empty(); }
};

/// Semiclassical operating point in the saturated regime, optionally with
/// the exciting laser coupled to a three-level medium.
SteadyState steady_state(const LaserParams& params, const std::optional<CouplingParams>& coupling = std::nullopt);

/// Self-consistent coherent-pump rate. kappa0 solves R k^2 - c kt k - c kt kappa = 0
/// with c = ThreeLevelParams::pump_constant(), i.e. kappa0 * n_tilde = c at the operating point.
CouplingParams solve_kappa0(const LaserParams& params, const ThreeLevelParams& tl);

/// Same root from the lumped constant c >= 0 directly; c = 0 gives kappa0 = 0.
CouplingParams solve_kappa0(const LaserParams& params, double pump_constant, double kappa_tilde);

}  // namespace lasernoise
