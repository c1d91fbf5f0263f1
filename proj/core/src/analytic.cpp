#include "lasernoise/analytic.hpp"

#include <sstream>
#include <string>

#include "lasernoise/errors.hpp"
#include "lasernoise/curve_io.hpp"

namespace lasernoise::analytic {

namespace {

void check_p(double p) {
  if (!(p <= 1.0)) throw ParameterError("p must be <= 1");
}

void check_nonneg(double v, const char* name) {
  if (!(v >= 0.0)) throw ParameterError(std::string(name) + " must be >= 0");
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ParameterError(std::string(name) + " must be > 0");
}

template <class F>
SpectrumCurve tabulate(std::string label, std::span<const double> grid, F&& f) {
  SpectrumCurve c;
  c.label = std::move(label);
  c.omega.assign(grid.begin(), grid.end());
  c.values.reserve(grid.size());
  for (double w : grid) c.values.push_back(f(w));
  c.validate();
  return c;
}

}  // namespace

double single(double p, double omega) { return 1.0 - p / (1.0 + omega * omega); }

double fbl(double p, double lambda, double omega) {
  const double g2 = (1.0 + lambda) * (1.0 + lambda);
  return 1.0 - (p - 1.0 + g2) / (g2 + omega * omega);
}

double coupled(double p, double kappa, double kappa_tilde, double kappa0, double omega) {
  const double w2 = omega * omega;
  const double k = kappa;
  const double kt = kappa_tilde;
  const double num = w2 + k * (k + kappa0) + kappa0 * (k + kappa0) * p / 2.0;
  const double re = w2 - kt * (2.0 * k + kappa0);
  const double im = 2.0 * kt + k + kappa0;
  return 1.0 - 2.0 * kt * kt * num / (re * re + w2 * im * im);
}

double coupled_fbl_general(double lambda, double kappa, double kappa_tilde, double x, double omega) {
  const double w2 = omega * omega;
  const double k = kappa;
  const double kt = kappa_tilde;
  const double l = lambda;
  const double num = w2 + k * k * (1.0 + x) * (1.0 + l * (2.0 + x) + l * l * (1.0 + x) * (1.0 - x / 2.0));
  const double re = w2 - kt * k * (2.0 + x + 2.0 * l * (1.0 + x));
  const double im = 2.0 * kt + k * (1.0 + x) * (1.0 + l);
  return 1.0 - 2.0 * kt * kt * num / (re * re + w2 * im * im);
}

double coupled_fbl(double lambda, double x, double omega) { return coupled_fbl_general(lambda, 1.0, 1.0, x, omega); }

double strong_limit(double x, double omega) { return 1.0 + (x / 4.0) * 4.0 / (omega * omega + 4.0); }

SpectrumCurve s_single(double p, std::span<const double> omega_grid) {
  check_p(p);
  auto c = tabulate("analytic single", omega_grid, [&](double w) { return single(p, w); });
  c.add_meta("p", io::format_number(p));
  return c;
}

SpectrumCurve s_fbl(double p, double lambda, std::span<const double> omega_grid) {
  check_p(p);
  check_nonneg(lambda, "lambda");
  auto c = tabulate("analytic fbl", omega_grid, [&](double w) { return fbl(p, lambda, w); });
  c.add_meta("p", io::format_number(p));
  c.add_meta("lambda", io::format_number(lambda));
  return c;
}

SpectrumCurve s_coupled(double p, double kappa, double kappa_tilde, double kappa0, std::span<const double> omega_grid) {
  check_p(p);
  check_positive(kappa, "kappa");
  check_positive(kappa_tilde, "kappa_tilde");
  check_positive(kappa0, "kappa0");
  auto c = tabulate("analytic coupled", omega_grid, [&](double w) { return coupled(p, kappa, kappa_tilde, kappa0, w); });
  c.add_meta("p", io::format_number(p));
  c.add_meta("kappa", io::format_number(kappa));
  c.add_meta("kappa_tilde", io::format_number(kappa_tilde));
  c.add_meta("kappa0", io::format_number(kappa0));
  return c;
}

SpectrumCurve s_coupled_fbl(double lambda, double x, std::span<const double> omega_grid) {
  check_nonneg(lambda, "lambda");
  check_positive(x, "x");
  auto c = tabulate("analytic coupled-fbl", omega_grid, [&](double w) { return coupled_fbl(lambda, x, w); });
  c.add_meta("p", "0");
  c.add_meta("lambda", io::format_number(lambda));
  c.add_meta("x", io::format_number(x));
  return c;
}

SpectrumCurve s_strong_limit(double x, std::span<const double> omega_grid) {
  check_positive(x, "x");
  auto c = tabulate("analytic strong-limit", omega_grid, [&](double w) { return strong_limit(x, w); });
  c.add_meta("x", io::format_number(x));
  return c;
}

}  // namespace lasernoise::analytic
