// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include "nsa/specfun.hpp"

#include <algorithm>
#include <numbers>
#include "nsa/error.hpp"

namespace nsa
{

LogScaled LogScaled::from_double(double v)
{
  if (v == 0.0)
  {
    return {};
  }
  return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
}

LogScaled operator*(const LogScaled &a, const LogScaled &b)
{
  if (a.sign == 0 || b.sign == 0)
  {
    return {};
  }
  return {a.sign * b.sign, a.log_mag + b.log_mag};
}

LogScaled operator/(const LogScaled &a, const LogScaled &b)
{
  NSA_REQUIRE(b.sign != 0, "LogScaled division by zero");
  if (a.sign == 0)
  {
    return {};
  }
  return {a.sign * b.sign, a.log_mag - b.log_mag};
}

LogScaled operator+(const LogScaled &a, const LogScaled &b)
{
  if (a.sign == 0)
  {
    return b;
  }
  if (b.sign == 0)
  {
    return a;
  }
  const LogScaled &hi = a.log_mag >= b.log_mag ? a : b;
  const LogScaled &lo = a.log_mag >= b.log_mag ? b : a;
  const double r = std::exp(lo.log_mag - hi.log_mag);
  if (hi.sign == lo.sign)
  {
    return {hi.sign, hi.log_mag + std::log1p(r)};
  }
  if (r == 1.0)
  {
    return {};
  }
  return {hi.sign, hi.log_mag + std::log1p(-r)};
}

LogScaled pow(const LogScaled &a, double p)
{
  NSA_REQUIRE(a.sign >= 0, "LogScaled pow of a negative value");
  if (a.sign == 0)
  {
    return {};
  }
  return {1, p * a.log_mag};
}

QuadratureRule QuadratureRule::trapezoid(std::span<const double> uniform_nodes)
{
  NSA_REQUIRE(uniform_nodes.size() >= 2, "trapezoid rule needs at least two nodes");
  QuadratureRule rule;
  rule.kind = QuadratureKind::Trapezoid;
  rule.nodes.assign(uniform_nodes.begin(), uniform_nodes.end());
  const std::size_t n = rule.nodes.size();
  const double h = (rule.nodes.back() - rule.nodes.front()) / static_cast<double>(n - 1);
  NSA_REQUIRE(h > 0.0, "trapezoid nodes must be strictly increasing");
  rule.weights.assign(n, h);
  rule.weights.front() = rule.weights.back() = 0.5 * h;
  return rule;
}

QuadratureRule QuadratureRule::gauss_legendre(int n, double a, double b)
{
  NSA_REQUIRE(n >= 1, "Gauss-Legendre needs n >= 1");
  NSA_REQUIRE(b > a, "Gauss-Legendre interval must satisfy b > a");
  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLegendre;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; i++)
  {
    // Newton on P_n from the Tricomi initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; it++)
    {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; j++)
      {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
      {
        break;
      }
    }
    {
      // Final derivative at the converged node.
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; j++)
      {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  if (n % 2 == 1)
  {
    rule.nodes[n / 2] = mid;
  }
  return rule;
}

double QuadratureRule::integrate(std::span<const double> samples) const
{
  NSA_REQUIRE(samples.size() == weights.size(), "sample count does not match the rule");
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); i++)
  {
    s += weights[i] * samples[i];
  }
  return s;
}

namespace
{

// Rescale threshold for the Hermite recurrence; far from both overflow and underflow.
constexpr double kBig = 0x1p+400;
const double kLogBig = std::log(kBig);

}  // namespace

void hermite_log_all(int kmax, double x, std::span<LogScaled> out)
{
  NSA_REQUIRE(kmax >= 0, "hermite index must be >= 0");
  NSA_REQUIRE(out.size() == static_cast<std::size_t>(kmax) + 1, "output span has wrong size");
  // Values are carried as v * exp(scale).
  double scale = -0.25 * std::log(std::numbers::pi) - 0.5 * x * x;
  double prev = 0.0, cur = 1.0;
  out[0] = LogScaled::from_log(scale);
  for (int j = 0; j < kmax; j++)
  {
    const double next = x * std::sqrt(2.0 / (j + 1.0)) * cur - std::sqrt(j / (j + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig)
    {
      cur /= kBig;
      prev /= kBig;
      scale += kLogBig;
    }
    LogScaled v = LogScaled::from_double(cur);
    if (v.sign != 0)
    {
      v.log_mag += scale;
    }
    out[j + 1] = v;
  }
}

LogScaled hermite_log(int k, double x)
{
  NSA_REQUIRE(k >= 0, "hermite index must be >= 0");
  double scale = -0.25 * std::log(std::numbers::pi) - 0.5 * x * x;
  double prev = 0.0, cur = 1.0;
  for (int j = 0; j < k; j++)
  {
    const double next = x * std::sqrt(2.0 / (j + 1.0)) * cur - std::sqrt(j / (j + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig)
    {
      cur /= kBig;
      prev /= kBig;
      scale += kLogBig;
    }
  }
  LogScaled v = LogScaled::from_double(cur);
  if (v.sign != 0)
  {
    v.log_mag += scale;
  }
  return v;
}

double hermite_h(int k, double x)
{
  return hermite_log(k, x).to_double();
}

LogScaled laguerre_log(int k, double x)
{
  NSA_REQUIRE(k >= 0, "laguerre index must be >= 0");
  NSA_REQUIRE(x <= 0.0, "laguerre_log requires x <= 0");
  if (k == 0)
  {
    return LogScaled::from_log(0.0);
  }
  double ratio = 1.0 - x;  // L_1 / L_0
  double log_value = std::log(ratio);
  for (int j = 1; j < k; j++)
  {
    ratio = ((2.0 * j + 1.0 - x) - j / ratio) / (j + 1.0);
    log_value += std::log(ratio);
  }
  return LogScaled::from_log(log_value);
}

LogScaled log_integral_exp(std::span<const double> log_f, const QuadratureRule &rule)
{
  NSA_REQUIRE(!log_f.empty(), "log_integral_exp on an empty grid");
  NSA_REQUIRE(log_f.size() == rule.weights.size(), "sample count does not match the rule");
  const double m = *std::max_element(log_f.begin(), log_f.end());
  if (m == -std::numeric_limits<double>::infinity())
  {
    return LogScaled::zero();
  }
  NSA_REQUIRE(std::isfinite(m), "log_integral_exp samples must be finite or -inf");
  // Neumaier-compensated sum in index order.
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < log_f.size(); i++)
  {
    const double term = rule.weights[i] * std::exp(log_f[i] - m);
    const double t = s + term;
    comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
    s = t;
  }
  return LogScaled::from_log(m + std::log(s + comp));
}

void LogSumExp::add(double log_term, double weight)
{
  if (log_term == -std::numeric_limits<double>::infinity() || weight == 0.0)
  {
    return;
  }
  if (log_term > max_)
  {
    sum_ = sum_ * std::exp(max_ - log_term) + weight;
    max_ = log_term;
  }
  else
  {
    sum_ += weight * std::exp(log_term - max_);
  }
}

LogScaled LogSumExp::result() const
{
  if (sum_ <= 0.0)
  {
    return LogScaled::zero();
  }
  return LogScaled::from_log(max_ + std::log(sum_));
}

}  // namespace nsa
