// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace nsa
{

//
// Scalar kernel: log-scaled arithmetic, Hermite functions, Laguerre polynomials and
// quadrature. Everything here is a pure function of its arguments.
//

// A real number stored as sign * exp(log_mag). log_mag is ignored when sign == 0.
struct LogScaled
{
  int sign = 0;
  // log|value|; -inf for zero so callers may read it without checking sign.
  double log_mag = -std::numeric_limits<double>::infinity();

  static LogScaled zero() { return {}; }
  static LogScaled from_log(double log_mag, int sign = 1) { return {sign, log_mag}; }
  static LogScaled from_double(double v);

  bool is_zero() const { return sign == 0; }

  // Overflows to +-inf and underflows to 0 like std::exp.
  double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(log_mag); }

  LogScaled operator-() const { return {-sign, log_mag}; }
  friend LogScaled operator*(const LogScaled &a, const LogScaled &b);
  friend LogScaled operator/(const LogScaled &a, const LogScaled &b);
  friend LogScaled operator+(const LogScaled &a, const LogScaled &b);
  friend LogScaled operator-(const LogScaled &a, const LogScaled &b) { return a + (-b); }
};

LogScaled pow(const LogScaled &a, double p);

enum class QuadratureKind
{
  Trapezoid,
  GaussLegendre
};

struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureKind kind = QuadratureKind::Trapezoid;

  std::size_t size() const { return nodes.size(); }

  // Composite trapezoid on a uniform grid (endpoint weights h/2).
  static QuadratureRule trapezoid(std::span<const double> uniform_nodes);

  // n-point Gauss-Legendre on [a, b]; exact for polynomials of degree 2n - 1.
  static QuadratureRule gauss_legendre(int n, double a, double b);

  double integrate(std::span<const double> samples) const;
};

// Orthonormal Hermite function h_k(x) = (2^k k! sqrt(pi))^{-1/2} H_k(x) exp(-x^2/2).
// Computed with the three-term recurrence on the normalized functions, carrying a running
// exponent so that the Gaussian factor never underflows on its own. The returned double
// underflows to 0 only where h_k itself is below the smallest normal double.
double hermite_h(int k, double x);

// Same as hermite_h but without the final exponentiation.
LogScaled hermite_log(int k, double x);

// h_0(x) .. h_kmax(x) in one sweep; out.size() must be kmax + 1.
void hermite_log_all(int kmax, double x, std::span<LogScaled> out);

// Laguerre polynomial L_k^0(x) for x <= 0, accumulated as a sum of log ratios
// L_{j+1}/L_j from (j+1)L_{j+1} = (2j+1-x)L_j - j L_{j-1}. All ratios are >= 1 there.
// Throws InvalidArgument for x > 0.
LogScaled laguerre_log(int k, double x);

// log of sum_i w_i exp(log_f_i), evaluated with a max shift. Samples may be -inf.
// Throws InvalidArgument on an empty or mismatched rule.
LogScaled log_integral_exp(std::span<const double> log_f, const QuadratureRule &rule);

// Log-sum-exp accumulator with a fixed summation order, for streaming integrals.
class LogSumExp
{
public:
  void add(double log_term, double weight = 1.0);
  LogScaled result() const;

private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

}  // namespace nsa
