#pragma once

#include <span>

#include "lasernoise/spectrum.hpp"

namespace lasernoise::analytic {

// Closed-form shot-normalized spectra. Frequencies are in units of kappa
// (kappa = 1) unless a function takes kappa explicitly.

/// Free-running laser: 1 - p / (1 + w^2).
double single(double p, double omega);

/// Laser in the feedback loop: 1 - [p - 1 + (1+l)^2] / [(1+l)^2 + w^2].
double fbl(double p, double lambda, double omega);

/// Measuring (three-level) laser coherently excited by the two-level laser.
double coupled(double p, double kappa, double kappa_tilde, double kappa0, double omega);

/// Measuring laser excited by a laser in the feedback loop, Poissonian pump (p = 0),
/// with independent kappa and kappa_tilde. x = kappa0 / kappa.
double coupled_fbl_general(double lambda, double kappa, double kappa_tilde, double x, double omega);

/// coupled_fbl_general with kappa = kappa_tilde = 1.
double coupled_fbl(double lambda, double x, double omega);

/// Strong-feedback, strong-coupling limit: 1 + (x/4) * 4 / (w^2 + 4).
double strong_limit(double x, double omega);

SpectrumCurve s_single(double p, std::span<const double> omega_grid);
SpectrumCurve s_fbl(double p, double lambda, std::span<const double> omega_grid);
SpectrumCurve s_coupled(double p, double kappa, double kappa_tilde, double kappa0, std::span<const double> omega_grid);
SpectrumCurve s_coupled_fbl(double lambda, double x, std::span<const double> omega_grid);
SpectrumCurve s_strong_limit(double x, std::span<const double> omega_grid);

}  // namespace lasernoise::analytic
