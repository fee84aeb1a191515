// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include "nsa/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include "nsa/error.hpp"

namespace nsa
{

namespace
{

constexpr double kPi = std::numbers::pi;

// 64-point Gauss-Legendre on [0, 1], built once per call site.
const QuadratureRule &UnitRule()
{
  static const QuadratureRule rule = QuadratureRule::gauss_legendre(64, 0.0, 1.0);
  return rule;
}

double Panel(double a, double b, auto &&f)
{
  const auto &rule = UnitRule();
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); i++)
  {
    s += rule.weights[i] * f(a + (b - a) * rule.nodes[i]);
  }
  return (b - a) * s;
}

}  // namespace

double omega_beta(double beta, int m)
{
  NSA_REQUIRE(beta > 0.0, "omega_beta requires beta > 0");
  NSA_REQUIRE(m >= 1, "omega_beta requires m >= 1");
  const double q = 1.0 / (2.0 * m);
  // [1/2, 1] with y = 1 - t^{2m}: the endpoint root becomes a smooth factor of t.
  const double t_half = std::pow(0.5, q);
  const double upper = Panel(0.0, t_half, [&](double t)
  {
    const double u = std::pow(t, 2 * m);
    const double one_minus = -std::expm1(beta * std::log1p(-u));  // 1 - (1-u)^beta
    return std::pow(one_minus, q) * 2.0 * m * std::pow(t, 2 * m - 1);
  });
  // [0, 1/2] in geometric panels so a non-integer power y^beta near 0 stays resolved.
  double lower = 0.0;
  double b = 0.5;
  for (int j = 0; j < 60; j++)
  {
    const double a = 0.5 * b;
    lower += Panel(a, b, [&](double y) { return std::pow(1.0 - std::pow(y, beta), q); });
    b = a;
  }
  lower += Panel(0.0, b, [&](double y) { return std::pow(1.0 - std::pow(y, beta), q); });
  return upper + lower;
}

double WkbResult::exponent() const
{
  return 1.0 / (1.0 / (2.0 * m) + 1.0 / beta);
}

double WkbResult::lambda_of_k(double k) const
{
  return std::pow((k + 0.5) * kPi / (2.0 * omega_beta), exponent());
}

double WkbResult::k_of_lambda(double lambda) const
{
  NSA_REQUIRE(lambda > 0.0, "k_of_lambda requires lambda > 0");
  return 2.0 * omega_beta * std::pow(lambda, 1.0 / exponent()) / kPi - 0.5;
}

WkbResult wkb_law(double beta, int m)
{
  return {beta, m, omega_beta(beta, m)};
}

double wkb_eigenvalue(int k, double beta)
{
  NSA_REQUIRE(k >= 0, "wkb_eigenvalue requires k >= 0");
  if (beta == 2.0)
  {
    return 2.0 * k + 1.0;
  }
  return wkb_law(beta).lambda_of_k(k);
}

LogScaled ho_projection_asymptotic(int k, double a)
{
  NSA_REQUIRE(k >= 1, "ho_projection_asymptotic requires k >= 1");
  NSA_REQUIRE(a != 0.0, "ho_projection_asymptotic is undefined at a = 0 (the exact norm is 1)");
  const double abs_a = std::abs(a);
  return LogScaled::from_log(2.0 * std::numbers::sqrt2 * abs_a * std::sqrt(double(k)) -
                             std::log(2.0) - 0.25 * std::log(2.0 * k) -
                             0.5 * std::log(abs_a * kPi));
}

LogScaled laguerre_asymptotic(int k, double x)
{
  NSA_REQUIRE(k >= 1, "laguerre_asymptotic requires k >= 1");
  NSA_REQUIRE(x < 0.0, "laguerre_asymptotic requires x < 0");
  return LogScaled::from_log(0.5 * x + 2.0 * std::sqrt(-k * x) - std::log(2.0 * std::sqrt(kPi)) -
                             0.25 * std::log(-x) - 0.25 * std::log(double(k)));
}

Theorem3Constants theorem3_constants(double alpha, double beta)
{
  NSA_REQUIRE(beta > 2.0, "theorem3_constants requires beta > 2");
  NSA_REQUIRE(alpha > 0.0 && alpha < 1.0 + 0.5 * beta,
              "theorem3_constants requires 0 < alpha < 1 + beta/2");
  const double sigma = 2.0 * alpha / (2.0 + beta);
  return {sigma, 2.0 * std::pow(kPi / (2.0 * omega_beta(beta)), sigma)};
}

double ExampleRate::comparator(double k) const
{
  NSA_REQUIRE(k >= 2.0, "example comparators need k >= 2 (log k > 0)");
  switch (family)
  {
    case ExampleFamily::KOverLog:
      return k / std::pow(std::log(k), gamma);
    case ExampleFamily::LogPower:
      return std::pow(k, omega);
    case ExampleFamily::LogLog:
      return std::log(k);
  }
  return 0.0;
}

double ExampleRate::ratio(double k, double log_norm_P) const
{
  switch (family)
  {
    case ExampleFamily::KOverLog:
      return log_norm_P / comparator(k);
    case ExampleFamily::LogPower:
      return std::exp(log_norm_P - omega * std::log(k));
    case ExampleFamily::LogLog:
      return std::exp(log_norm_P - std::log(comparator(k)));
  }
  return 0.0;
}

double ExampleRate::theory_log_norm(double k) const
{
  if (family == ExampleFamily::KOverLog)
  {
    return limit * comparator(k);
  }
  return std::log(limit) + std::log(comparator(k));
}

ExampleRate example_rates(ExampleFamily family, double beta, double gamma)
{
  NSA_REQUIRE(beta > 2.0, "example_rates requires beta > 2");
  ExampleRate r;
  r.family = family;
  r.beta = beta;
  const double omega_b = omega_beta(beta);
  switch (family)
  {
    case ExampleFamily::KOverLog:
      NSA_REQUIRE(gamma > 0.0, "k-over-log family requires gamma > 0 (gamma = 0 has only "
                               "two-sided rate bounds)");
      r.gamma = gamma;
      r.limit = omega_b / (kPi * std::pow(1.0 + 0.5 * beta, gamma));
      break;
    case ExampleFamily::LogPower:
      NSA_REQUIRE(gamma > 0.0, "log-power family requires gamma > 0");
      r.gamma = gamma;
      r.omega = 4.0 * gamma / (2.0 + beta);
      r.limit = 2.0 * std::pow(2.0 * omega_b / kPi, r.omega);
      break;
    case ExampleFamily::LogLog:
      r.limit = 1.0 + 0.5 * beta;
      break;
  }
  return r;
}

LogScaled even_p_asymptotic(int k, double a, double norm_exp_minus_p)
{
  NSA_REQUIRE(k >= 1, "even_p_asymptotic requires k >= 1");
  NSA_REQUIRE(a > 0.0, "even_p_asymptotic requires a > 0");
  NSA_REQUIRE(norm_exp_minus_p > 0.0, "even_p_asymptotic requires a positive norm");
  return LogScaled::from_log(std::log(norm_exp_minus_p) - 0.25 * std::log(a * kPi) -
                             0.375 * std::log(2.0 * k) + a * std::sqrt(2.0 * k));
}

double even_p_norm_exp_minus_p(double a)
{
  NSA_REQUIRE(a > 0.0, "even_p_norm_exp_minus_p requires a > 0");
  // int e^{-2a sqrt(1+x^2)} dx = int e^{-2a cosh t} cosh t dt; the integrand is entire and
  // doubly-exponentially decaying, so the trapezoid rule converges geometrically.
  const double t_max = std::acosh(1.0 + 60.0 / a);
  const double h = 0.005;
  const int n = static_cast<int>(std::ceil(t_max / h));
  LogSumExp acc;
  for (int i = -n; i <= n; i++)
  {
    const double c = std::cosh(i * h);
    acc.add(-2.0 * a * c + std::log(c), h);
  }
  return std::exp(0.5 * acc.result().log_mag);
}

HigherOrderRate higher_order_rate(int m, double a)
{
  NSA_REQUIRE(m >= 1, "higher_order_rate requires m >= 1");
  NSA_REQUIRE(a >= 0.0, "higher_order_rate requires a >= 0");
  const double e = 1.0 / (1.0 + m);
  return {e, 2.0 * a * std::pow(kPi / (2.0 * omega_beta(2.0 * m)), e)};
}

double lg_variation(double beta, double mu, double a, double b)
{
  NSA_REQUIRE(beta > 2.0, "Liouville-Green control requires beta > 2");
  NSA_REQUIRE(a > 0.0 && b >= a, "lg_variation requires 0 < a <= b");
  const double c = beta * beta / 16.0 + beta / 4.0;
  // Antiderivative of F' vanishing at infinity.
  auto F = [&](double t)
  {
    if (std::isinf(t))
    {
      return 0.0;
    }
    return -c * std::pow(t, -1.0 - 0.5 * beta) / (1.0 + 0.5 * beta) -
           mu * std::pow(t, 1.0 - 0.5 * beta) / (0.5 * beta - 1.0);
  };
  if (mu < 0.0)
  {
    // F' changes sign once, at t0 = sqrt(c/|mu|).
    const double t0 = std::sqrt(c / -mu);
    if (a < t0 && t0 < b)
    {
      return std::abs(F(t0) - F(a)) + std::abs(F(b) - F(t0));
    }
  }
  return std::abs(F(b) - F(a));
}

double lg_minimal_R(double beta, double mu)
{
  NSA_REQUIRE(beta > 2.0, "Liouville-Green control requires beta > 2");
  const double inf = std::numeric_limits<double>::infinity();
  double lo = std::log(1e-8), hi = std::log(1e30);
  if (lg_variation(beta, mu, std::exp(hi), inf) > 0.5)
  {
    throw NumericalFailure("lg_minimal_R", "no admissible R below 1e30");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; it++)
  {
    const double mid = 0.5 * (lo + hi);
    (lg_variation(beta, mu, std::exp(mid), inf) > 0.5 ? lo : hi) = mid;
  }
  return std::exp(hi);
}

LgApproximant lg_approximant(double beta, double mu, double R)
{
  NSA_REQUIRE(beta > 2.0, "Liouville-Green approximant requires beta > 2");
  NSA_REQUIRE(R > 0.0, "Liouville-Green approximant requires R > 0");
  const double r_min = lg_minimal_R(beta, mu);
  if (lg_variation(beta, mu, R, std::numeric_limits<double>::infinity()) > 0.5)
  {
    detail::Fail("R = " + std::to_string(R) + " violates int_R^inf |F'| <= 1/2; minimal R = " +
                 std::to_string(r_min));
  }
  return {beta, mu, R};
}

LogScaled LgApproximant::w_minus(double x) const
{
  NSA_REQUIRE(x >= R, "w_minus is defined on [R, inf)");
  const double e = 1.0 + 0.5 * beta;
  return LogScaled::from_log(-0.25 * beta * std::log(x) - (std::pow(x, e) - std::pow(R, e)) / e);
}

LogScaled LgApproximant::w_plus(double x) const
{
  NSA_REQUIRE(x >= R, "w_plus is defined on [R, inf)");
  const double e = 1.0 + 0.5 * beta;
  return LogScaled::from_log(-0.25 * beta * std::log(x) + (std::pow(x, e) - std::pow(R, e)) / e);
}

double LgApproximant::variation(double a, double b) const
{
  return lg_variation(beta, mu, a, b);
}

double LgApproximant::error_bound(double x) const
{
  NSA_REQUIRE(x >= R, "error_bound is defined on [R, inf]");
  return std::expm1(0.5 * variation(R, x));
}

double LgApproximant::error_bound_minus(double x) const
{
  NSA_REQUIRE(x >= R, "error_bound_minus is defined on [R, inf]");
  return std::expm1(0.5 * variation(x, std::numeric_limits<double>::infinity()));
}

}  // namespace nsa
