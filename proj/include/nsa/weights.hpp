// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace nsa
{

// Value and first two derivatives of a real weight at one point.
struct WeightDerivs
{
  double p = 0.0, dp = 0.0, ddp = 0.0;
};

enum class WeightFamily
{
  Zero,            // p = 0
  HoShift,         // p = a x on the harmonic oscillator (shift form B = 2iax)
  OddPower,        // p = x (1 + x^2)^{(alpha-1)/2}
  KOverLog,        // p = x |x|^{beta/2} / (log(e + |x|))^gamma
  ScaledOddPower,  // p = x |x|^{beta/2} / C1
  LogPower,        // p = gamma log x for x >= 2, 0 on |x| <= 1, odd
  LogLog,          // p = log log x for x >= e^2, 0 on |x| <= e, odd
  EvenSqrt,        // p = a sqrt(1 + x^2)
  Custom
};

// A C^2 real-valued function with derivatives, used as an imaginary part r of the weight.
struct PhaseFunction
{
  std::string name;
  std::function<WeightDerivs(double)> eval;

  static PhaseFunction sine();  // r = sin x
  static PhaseFunction zero();
};

// Conjugation weight p(x) plus an optional imaginary part r(x).
// Bridged families blend the outer formula into 0 with the quintic smoothstep
// S(t) = 10t^3 - 15t^4 + 6t^5, so p = S(t) g(x) is C^2 at both ends of the bridge.
class WeightSpec
{
public:
  static WeightSpec zero();
  static WeightSpec ho_shift(double a);
  static WeightSpec odd_power(double alpha, double beta);
  static WeightSpec k_over_log(double gamma, double beta);
  static WeightSpec scaled_odd_power(double c1, double beta);
  static WeightSpec log_power(double gamma, double beta);
  static WeightSpec loglog(double beta);
  static WeightSpec even_sqrt(double a);
  // alpha is the growth exponent used by the bound check.
  static WeightSpec custom(std::string name, std::function<WeightDerivs(double)> eval,
                           double alpha, bool odd);

  WeightSpec with_phase(PhaseFunction r) const;
  // p -> -p (the phase is kept).
  WeightSpec negated() const;

  WeightDerivs eval(double x) const;
  double p(double x) const { return eval(x).p; }
  const std::optional<PhaseFunction> &phase() const { return phase_; }

  WeightFamily family() const { return family_; }
  bool is_zero() const { return family_ == WeightFamily::Zero; }
  bool is_odd() const { return odd_; }
  double a() const { return a_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double c1() const { return c1_; }
  double beta() const { return beta_; }

  // Exponent in |p^{(j)}(x)| <= C (1 + x^2)^{(alpha - j)/2}; 1 + beta/2 for the relaxed
  // families, whose bound also carries an additive constant.
  double growth_exponent() const;
  bool relaxed_bound() const;

  // Smallest C with |p^{(j)}(x)| <= C (1 + x^2)^{(alpha-j)/2} + C2 (C2 = 1 for relaxed
  // families, 0 otherwise) at the given nodes, j = 0, 1, 2.
  double growth_constant(std::span<const double> nodes) const;

  // Short machine-readable name ("odd_power(alpha=1)").
  std::string describe() const;
  // Bridge interval for the smoothed families, empty otherwise.
  std::string bridge() const;

private:
  WeightFamily family_ = WeightFamily::Zero;
  double a_ = 0.0, alpha_ = 0.0, gamma_ = 0.0, c1_ = 1.0, beta_ = 2.0;
  double sign_ = 1.0;
  bool odd_ = true;
  std::string name_;
  std::function<WeightDerivs(double)> custom_;
  std::optional<PhaseFunction> phase_;
};

}  // namespace nsa
