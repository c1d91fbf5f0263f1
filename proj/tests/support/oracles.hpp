#pragma once

// Reference values computed in the test code, independently of the library.
// The transfer-function oracles write the linearized rate equations out by hand
// (scalar complex arithmetic, Cramer's rule) instead of going through the
// matrix engine, and the closed forms are expanded as polynomials in w^2.

#include <cmath>
#include <complex>

namespace oracle {

using cd = std::complex<double>;

// Single laser, optionally in an ideal feedback loop, kappa = 1, i_bar = 1:
//   d eps/dt = -eps + F - lambda (eps + S),   i = eps + S.
inline double fbl_transfer(double p, double lambda, double w) {
  const cd den(1.0 + lambda, -w);
  const cd hF = 1.0 / den;
  const cd hS = 1.0 - lambda / den;
  return -p * std::norm(hF) + std::norm(hS);
}

// Same loop with a causal single-pole filter of bandwidth G on the fed-back
// current: d j/dt = -G j + G (eps + S), pump modulation -lambda j.
inline double fbl_filtered_transfer(double p, double lambda, double G, double w) {
  const cd s(0.0, -w);
  // (s + 1) eps = F - lambda j,  (s + G) j = G (eps + S)
  // => eps [(s + 1)(s + G) + lambda G] = (s + G) F - lambda G S
  const cd det = (s + 1.0) * (s + G) + lambda * G;
  const cd eF = (s + G) / det;
  const cd eS = -lambda * G / det;
  const cd hF = eF;
  const cd hS = eS + 1.0;
  return -p * std::norm(hF) + std::norm(hS);
}

// Coupled pair with feedback on the exciting laser, kappa = kt = 1, x = kappa0.
// States (eps, eps~), sources F, F~, S, S~ with <F F> = -p (1+x) n,
// <F~ F~> = -2 n~, <F F~> = x n, <S S> = n, <S~ S~> = n~, n~ = x n.
// Normalized to i~ = n~; n cancels, so n = 1.
inline double coupled_fbl_transfer(double p, double lambda, double x, double w) {
  const cd s(0.0, -w);
  const double n = 1.0;
  const double nt = x * n;
  const cd a11 = s + (1.0 + x) * (1.0 + lambda);
  const cd a12 = -1.0;
  const cd a21 = -x;
  const cd a22 = s + 2.0;
  const cd det = a11 * a22 - a12 * a21;
  // eps~ = (-a21 r1 + a11 r2) / det with r = L f; the measured current is eps~ + S~.
  const cd gF = -a21 / det;
  const cd gFt = a11 / det;
  const cd gS = -a21 * (-lambda * (1.0 + x)) / det;
  const cd gSt = 1.0;
  const double cFF = -p * (1.0 + x) * n;
  const double cFtFt = -2.0 * nt;
  const double cFFt = x * n;
  const double total = cFF * std::norm(gF) + cFtFt * std::norm(gFt) + 2.0 * cFFt * std::real(gF * std::conj(gFt)) +
                       n * std::norm(gS) + nt * std::norm(gSt);
  return total / nt;
}

inline double coupled_transfer(double p, double x, double w) {
  return coupled_fbl_transfer(p, 0.0, x, w);
}

// Closed form of the free-running spectrum as a polynomial ratio.
inline double single_poly(double p, double w) {
  const double w2 = w * w;
  return (w2 + 1.0 - p) / (w2 + 1.0);
}

// Closed form for the coupled pair written as one rational function of w^2, general kappa.
inline double coupled_poly(double p, double k, double kt, double k0, double w) {
  const double w2 = w * w;
  const double num = 2.0 * kt * kt * (w2 + k * (k + k0) + 0.5 * p * k0 * (k + k0));
  const double re = w2 - kt * (2.0 * k + k0);
  const double im = 2.0 * kt + k + k0;
  return 1.0 - num / (re * re + w2 * im * im);
}

// Strong-feedback limit.
inline double strong_limit(double x, double w) { return 1.0 + x / (w * w + 4.0); }

// Positive root of R k^2 - c kt k - c kt kappa = 0 by the textbook formula.
inline double kappa0_root(double R, double kappa, double kt, double c) {
  const double A = R, B = -c * kt, C = -c * kt * kappa;
  return (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
}

// sin(x) / x
inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace oracle
