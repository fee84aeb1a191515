// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nsa/specfun.hpp"

namespace nsa
{

//
// Closed-form and asymptotic predictions: action constants, WKB eigenvalue law, the
// growth laws for the projection norms and Liouville-Green approximants with error
// control. Pure functions.
//

// Omega_{beta,m} = int_0^1 (1 - y^beta)^{1/(2m)} dy. m = 1 gives the usual action constant
// Omega_beta in (0, 1); Omega_2 = pi/4.
double omega_beta(double beta, int m = 1);

// WKB law for D^{2m} + |x|^beta: int (lambda - |x|^beta)^{1/(2m)} dx = (k + 1/2) pi, i.e.
// lambda = ((k + 1/2) pi / (2 Omega))^{1/(1/(2m) + 1/beta)}.
struct WkbResult
{
  double beta = 2.0;
  int m = 1;
  double omega_beta = 0.0;

  double lambda_of_k(double k) const;
  double k_of_lambda(double lambda) const;
  // Exponent 1/(1/(2m) + 1/beta); 2 beta/(2 + beta) for m = 1.
  double exponent() const;
};

WkbResult wkb_law(double beta, int m = 1);

double wkb_eigenvalue(int k, double beta);

// Leading term exp(2^{3/2}|a| sqrt k) / (2 (2k)^{1/4} sqrt(|a| pi)) of the harmonic
// oscillator projection norm for the shift weight p = a x.
LogScaled ho_projection_asymptotic(int k, double a);

// Leading term e^{x/2} e^{2 sqrt(-k x)} / (2 sqrt(pi) (-x)^{1/4} k^{1/4}) of L_k^0(x), x < 0.
LogScaled laguerre_asymptotic(int k, double x);

struct Theorem3Constants
{
  double sigma = 0.0;
  double c = 0.0;
};

// sigma = 2 alpha/(2 + beta), c = 2 (pi/(2 Omega_beta))^sigma for
// p(x) = x (1 + x^2)^{(alpha-1)/2}; requires 0 < alpha < 1 + beta/2 and beta > 2.
Theorem3Constants theorem3_constants(double alpha, double beta);

enum class ExampleFamily
{
  LogLog,    // p = log log x for x >= e^2:      ||P_k|| / log k     -> 1 + beta/2
  LogPower,  // p = gamma log x for x >= 2:      ||P_k|| / k^omega   -> 2 (2 Omega/pi)^omega
  KOverLog   // p = x |x|^{beta/2}/(log x)^gamma: log||P_k|| / (k/(log k)^gamma)
             //                                   -> Omega/(pi (1 + beta/2)^gamma)
};

// Predicted limit of observed(k)/comparator(k) for one of the slow-growth weight families,
// using the limit constants exactly as published.
struct ExampleRate
{
  ExampleFamily family = ExampleFamily::LogLog;
  double beta = 4.0;
  double gamma = 0.0;
  double omega = 0.0;  // 4 gamma/(2 + beta) for LogPower, 0 otherwise
  double limit = 0.0;

  // Comparator evaluated at k (k/(log k)^gamma, k^omega or log k).
  double comparator(double k) const;
  // Observed quantity from log||P_k||: log||P_k|| for KOverLog, ||P_k|| otherwise.
  // Returns the ratio observed/comparator, computed in log form where it matters.
  double ratio(double k, double log_norm_P) const;
  // log of the predicted ||P_k|| (limit * comparator, or exp of it for KOverLog).
  double theory_log_norm(double k) const;
};

// gamma is ignored for LogLog. KOverLog with gamma = 0 is the exponential-order regime,
// which only has two-sided bounds, and is rejected.
ExampleRate example_rates(ExampleFamily family, double beta, double gamma = 0.0);

// Leading term ||e^{-p}|| (a pi)^{-1/4} (2k)^{-3/8} exp(a sqrt(2k)) for the even weight
// p = a sqrt(1 + x^2) on the harmonic oscillator. norm_exp_minus_p = ||e^{-p}||_{L^2}.
LogScaled even_p_asymptotic(int k, double a, double norm_exp_minus_p);

// ||e^{-p}||_{L^2} for p = a sqrt(1 + x^2), by trapezoid quadrature in x = sinh t.
double even_p_norm_exp_minus_p(double a);

struct HigherOrderRate
{
  double exponent = 0.0;
  double constant = 0.0;
};

// (1/(1+m), 2a (pi/(2 Omega_{2m}))^{1/(1+m)}); m = 1 recovers (1/2, 2^{3/2} a).
HigherOrderRate higher_order_rate(int m, double a);

// Liouville-Green solutions of w'' = (x^beta - mu) w on [R, inf):
//   w_pm(x) = x^{-beta/4} exp(pm int_R^x t^{beta/2} dt) (1 + r_pm(x)).
// The error-control function has derivative
//   F'(t) = (beta^2/16 + beta/4) t^{-2-beta/2} + mu t^{-beta/2}.
// w_+ is normalized at R (|r_+| <= exp(V_{R,x}/2) - 1) and w_- at infinity
// (|r_-| <= exp(V_{x,inf}/2) - 1), where V_{a,b} = int_a^b |F'|.
struct LgApproximant
{
  double beta = 4.0;
  double mu = 0.0;
  double R = 1.0;

  LogScaled w_minus(double x) const;
  LogScaled w_plus(double x) const;
  // V_{a,b}(F) for R <= a <= b <= inf.
  double variation(double a, double b) const;
  // exp(V_{R,x}/2) - 1: nondecreasing in x, bounded by exp(V_{R,inf}/2) - 1 <= e^{1/4} - 1.
  double error_bound(double x) const;
  // exp(V_{x,inf}/2) - 1, the bound for the recessive solution.
  double error_bound_minus(double x) const;
};

// int_a^b |F'(t)| dt in closed form, for 0 < a <= b <= inf.
double lg_variation(double beta, double mu, double a, double b);

// Smallest R with V_{R,inf}(F) <= 1/2.
double lg_minimal_R(double beta, double mu);

// Requires beta > 2 and R >= lg_minimal_R(beta, mu); the error names the minimal R.
LgApproximant lg_approximant(double beta, double mu, double R);

}  // namespace nsa
