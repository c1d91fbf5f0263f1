#include "lasernoise/params.hpp"

#include <cmath>
#include <sstream>

#include "lasernoise/errors.hpp"

namespace lasernoise {

namespace detail {

void throw_invariant(const char* expr, const char* file, int line, const std::string& msg) {
  std::ostringstream os;
  os << file << ':' << line << ": invariant `" << expr << "` failed: " << msg;
  throw InvariantViolation(os.str());
}

}  // namespace detail

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    std::ostringstream os;
    os << name << " must be finite and > 0 (got " << v << ')';
    throw ParameterError(os.str());
  }
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ParameterError(std::string(name) + " must be finite");
}

}  // namespace

void LaserParams::validate() const {
  require_positive(kappa, "kappa");
  require_positive(R, "R");
  require_finite(p, "p");
  if (p > 1.0) throw ParameterError("p must be <= 1 (got " + std::to_string(p) + ")");
  require_positive(beta_inv, "beta_inv");
  require_positive(gamma1, "gamma1");
  require_positive(gamma2, "gamma2");
  require_positive(gamma_perp, "gamma_perp");
  if (g) {
    require_positive(*g, "g");
    const double implied = gamma_perp * gamma1 / (2.0 * *g * *g);
    if (std::abs(implied - beta_inv) > 1e-12 * std::abs(implied)) {
      std::ostringstream os;
      os.precision(17);
      os << "beta_inv = " << beta_inv << " disagrees with gamma_perp*gamma1/(2g^2) = " << implied;
      throw ParameterError(os.str());
    }
  }
}

void FeedbackParams::validate() const {
  require_finite(lambda, "lambda");
  if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
  require_positive(filter_bandwidth, "filter_bandwidth");
}

void ThreeLevelParams::validate() const {
  require_positive(kappa_tilde, "kappa_tilde");
  require_positive(gamma2_tilde, "gamma2_tilde");
  require_positive(gamma1_tilde, "gamma1_tilde");
  require_positive(g13_over_g12, "g13_over_g12");
  require_finite(N_tilde, "N_tilde");
  if (N_tilde < 1.0) throw ParameterError("N_tilde must be >= 1");
}

std::vector<std::string> ThreeLevelParams::warnings() const {
  std::vector<std::string> out;
  if (gamma2_tilde > gamma1_tilde / 10.0) {
    out.push_back("gamma2_tilde << gamma1_tilde not satisfied (gamma2_tilde = " + std::to_string(gamma2_tilde) +
                  ", gamma1_tilde = " + std::to_string(gamma1_tilde) + ")");
  }
  return out;
}

CouplingParams CouplingParams::make(double kappa0, double kappa_tilde, double kappa) {
  CouplingParams c{kappa0, kappa_tilde, kappa0 / kappa};
  c.validate(kappa);
  return c;
}

void CouplingParams::validate(double kappa) const {
  require_finite(kappa0, "kappa0");
  if (kappa0 < 0.0) throw ParameterError("kappa0 must be >= 0");
  require_positive(kappa_tilde, "kappa_tilde");
  const double expect = kappa0 / kappa;
  if (std::abs(x - expect) > 1e-12 * std::abs(expect)) throw ParameterError("coupling x must equal kappa0/kappa");
}

SteadyState steady_state(const LaserParams& params, const std::optional<CouplingParams>& coupling) {
  params.validate();
  if (coupling) coupling->validate(params.kappa);

  const double kappa0 = coupling ? coupling->kappa0 : 0.0;
  const double beta = 1.0 / params.beta_inv;

  SteadyState s;
  s.n = params.R / (params.kappa + kappa0);
  s.n_tilde = coupling ? s.n * kappa0 / coupling->kappa_tilde : 0.0;
  s.I = beta * s.n;
  s.N1_bar = params.kappa / (beta * params.gamma1);
  s.N2_bar = params.kappa * s.n / params.gamma2;
  // Stationary generation: the gain 2 g <alpha* P> balances every photon loss channel.
  s.gP_bar = 0.5 * (params.kappa + kappa0) * s.n;
  s.i_bar = params.kappa * s.n;
  s.i_tilde_bar = coupling ? coupling->kappa_tilde * s.n_tilde : 0.0;

  if (s.I < 10.0) {
    s.warnings.push_back("weak saturation: I = beta*n = " + std::to_string(s.I) + " < 10");
  }
  if (!(params.gamma1 < params.gamma2 / 10.0)) {
    s.warnings.push_back("gamma1 < gamma2/10 violated; stationary populations assume gamma1 << gamma2");
  }
  return s;
}

CouplingParams solve_kappa0(const LaserParams& params, double pump_constant, double kappa_tilde) {
  params.validate();
  require_positive(kappa_tilde, "kappa_tilde");
  require_finite(pump_constant, "pump constant");
  if (pump_constant < 0.0) throw ParameterError("pump constant must be >= 0");
  const double c = pump_constant;
  if (c == 0.0) return CouplingParams::make(0.0, kappa_tilde, params.kappa);

  // R k^2 - c kt k - c kt kappa = 0; both terms of the numerator are positive,
  // so the positive root has no cancellation.
  const double b = c * kappa_tilde;
  const double disc = b * b + 4.0 * params.R * c * kappa_tilde * params.kappa;
  LASERNOISE_ENSURE(disc >= 0.0, "negative discriminant for positive inputs");
  const double kappa0 = (b + std::sqrt(disc)) / (2.0 * params.R);
  return CouplingParams::make(kappa0, kappa_tilde, params.kappa);
}

CouplingParams solve_kappa0(const LaserParams& params, const ThreeLevelParams& tl) {
  tl.validate();
  return solve_kappa0(params, tl.pump_constant(), tl.kappa_tilde);
}

}  // namespace lasernoise
