// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include "nsa/weights.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include "nsa/error.hpp"

namespace nsa
{

namespace
{

constexpr double kE = std::numbers::e;

// Quintic smoothstep and its first two derivatives in t.
WeightDerivs Smoothstep(double t)
{
  if (t <= 0.0)
  {
    return {0.0, 0.0, 0.0};
  }
  if (t >= 1.0)
  {
    return {1.0, 0.0, 0.0};
  }
  const double t2 = t * t;
  return {t2 * t * (10.0 - 15.0 * t + 6.0 * t2), 30.0 * t2 * (1.0 - t) * (1.0 - t),
          60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)};
}

// p = S((x - x0)/(x1 - x0)) g(x) for x >= 0, given g and its derivatives.
WeightDerivs Bridge(double x, double x0, double x1, auto &&g)
{
  if (x <= x0)
  {
    return {};
  }
  const WeightDerivs gx = g(x);
  if (x >= x1)
  {
    return gx;
  }
  const double w = x1 - x0;
  WeightDerivs s = Smoothstep((x - x0) / w);
  s.dp /= w;
  s.ddp /= w * w;
  return {s.p * gx.p, s.dp * gx.p + s.p * gx.dp, s.ddp * gx.p + 2.0 * s.dp * gx.dp + s.p * gx.ddp};
}

// Odd extension of a function given for x >= 0.
WeightDerivs OddExtend(double x, auto &&half)
{
  if (x >= 0.0)
  {
    return half(x);
  }
  const WeightDerivs h = half(-x);
  return {-h.p, h.dp, -h.ddp};
}

void RequireSuperquadratic(double beta)
{
  NSA_REQUIRE(beta > 2.0, "this weight family requires beta > 2");
}

}  // namespace

PhaseFunction PhaseFunction::sine()
{
  return {"sin(x)", [](double x) { return WeightDerivs{std::sin(x), std::cos(x), -std::sin(x)}; }};
}

PhaseFunction PhaseFunction::zero()
{
  return {"0", [](double) { return WeightDerivs{}; }};
}

WeightSpec WeightSpec::zero()
{
  WeightSpec w;
  w.family_ = WeightFamily::Zero;
  return w;
}

WeightSpec WeightSpec::ho_shift(double a)
{
  NSA_REQUIRE(std::isfinite(a), "ho_shift requires finite a");
  WeightSpec w;
  w.family_ = a == 0.0 ? WeightFamily::Zero : WeightFamily::HoShift;
  w.a_ = a;
  w.alpha_ = 1.0;
  return w;
}

WeightSpec WeightSpec::odd_power(double alpha, double beta)
{
  RequireSuperquadratic(beta);
  NSA_REQUIRE(alpha > 0.0 && alpha < 1.0 + 0.5 * beta,
              "odd_power requires 0 < alpha < 1 + beta/2");
  WeightSpec w;
  w.family_ = WeightFamily::OddPower;
  w.alpha_ = alpha;
  w.beta_ = beta;
  return w;
}

WeightSpec WeightSpec::k_over_log(double gamma, double beta)
{
  RequireSuperquadratic(beta);
  NSA_REQUIRE(gamma > 0.0, "k_over_log requires gamma > 0");
  WeightSpec w;
  w.family_ = WeightFamily::KOverLog;
  w.gamma_ = gamma;
  w.beta_ = beta;
  w.alpha_ = 1.0 + 0.5 * beta;
  return w;
}

WeightSpec WeightSpec::scaled_odd_power(double c1, double beta)
{
  RequireSuperquadratic(beta);
  NSA_REQUIRE(c1 > 0.0, "scaled_odd_power requires C1 > 0");
  WeightSpec w;
  w.family_ = WeightFamily::ScaledOddPower;
  w.c1_ = c1;
  w.beta_ = beta;
  w.alpha_ = 1.0 + 0.5 * beta;
  return w;
}

WeightSpec WeightSpec::log_power(double gamma, double beta)
{
  RequireSuperquadratic(beta);
  NSA_REQUIRE(gamma > 0.0, "log_power requires gamma > 0");
  WeightSpec w;
  w.family_ = WeightFamily::LogPower;
  w.gamma_ = gamma;
  w.beta_ = beta;
  w.alpha_ = 1.0 + 0.5 * beta;
  return w;
}

WeightSpec WeightSpec::loglog(double beta)
{
  RequireSuperquadratic(beta);
  WeightSpec w;
  w.family_ = WeightFamily::LogLog;
  w.beta_ = beta;
  w.alpha_ = 1.0 + 0.5 * beta;
  return w;
}

WeightSpec WeightSpec::even_sqrt(double a)
{
  NSA_REQUIRE(a >= 0.0, "even_sqrt requires a >= 0");
  WeightSpec w;
  w.family_ = a == 0.0 ? WeightFamily::Zero : WeightFamily::EvenSqrt;
  w.a_ = a;
  w.alpha_ = 1.0;
  w.odd_ = a == 0.0;
  return w;
}

WeightSpec WeightSpec::custom(std::string name, std::function<WeightDerivs(double)> eval,
                              double alpha, bool odd)
{
  NSA_REQUIRE(static_cast<bool>(eval), "custom weight needs an evaluator");
  WeightSpec w;
  w.family_ = WeightFamily::Custom;
  w.name_ = std::move(name);
  w.custom_ = std::move(eval);
  w.alpha_ = alpha;
  w.odd_ = odd;
  return w;
}

WeightSpec WeightSpec::with_phase(PhaseFunction r) const
{
  NSA_REQUIRE(static_cast<bool>(r.eval), "phase function needs an evaluator");
  WeightSpec w = *this;
  w.phase_ = std::move(r);
  return w;
}

WeightSpec WeightSpec::negated() const
{
  WeightSpec w = *this;
  w.sign_ = -sign_;
  return w;
}

WeightDerivs WeightSpec::eval(double x) const
{
  WeightDerivs d;
  switch (family_)
  {
    case WeightFamily::Zero:
      return {};
    case WeightFamily::HoShift:
      d = {a_ * x, a_, 0.0};
      break;
    case WeightFamily::OddPower:
    {
      const double q = 1.0 + x * x;
      d = {x * std::pow(q, 0.5 * (alpha_ - 1.0)), std::pow(q, 0.5 * (alpha_ - 3.0)) * (1.0 + alpha_ * x * x),
           (alpha_ - 1.0) * x * std::pow(q, 0.5 * (alpha_ - 5.0)) * (3.0 + alpha_ * x * x)};
      break;
    }
    case WeightFamily::KOverLog:
      d = OddExtend(x, [&](double t)
      {
        const double s = 0.5 * beta_, l = std::log(kE + t), et = kE + t;
        const double lg = std::pow(l, -gamma_);
        const double xs = std::pow(t, s);
        const double xs1 = std::pow(t, s - 1.0);
        return WeightDerivs{
            t * xs * lg,
            (1.0 + s) * xs * lg - gamma_ * t * xs * lg / (l * et),
            (1.0 + s) * s * xs1 * lg - 2.0 * (1.0 + s) * gamma_ * xs * lg / (l * et) +
                gamma_ * (gamma_ + 1.0) * t * xs * lg / (l * l * et * et) +
                gamma_ * t * xs * lg / (l * et * et)};
      });
      break;
    case WeightFamily::ScaledOddPower:
      d = OddExtend(x, [&](double t)
      {
        const double s = 0.5 * beta_;
        return WeightDerivs{std::pow(t, 1.0 + s) / c1_, (1.0 + s) * std::pow(t, s) / c1_,
                            (1.0 + s) * s * std::pow(t, s - 1.0) / c1_};
      });
      break;
    case WeightFamily::LogPower:
      d = OddExtend(x, [&](double t)
      {
        return Bridge(t, 1.0, 2.0, [&](double u)
        { return WeightDerivs{gamma_ * std::log(u), gamma_ / u, -gamma_ / (u * u)}; });
      });
      break;
    case WeightFamily::LogLog:
      d = OddExtend(x, [&](double t)
      {
        return Bridge(t, kE, kE * kE, [&](double u)
        {
          const double l = std::log(u);
          return WeightDerivs{std::log(l), 1.0 / (u * l), -(l + 1.0) / (u * u * l * l)};
        });
      });
      break;
    case WeightFamily::EvenSqrt:
    {
      const double q = std::sqrt(1.0 + x * x);
      d = {a_ * q, a_ * x / q, a_ / (q * q * q)};
      break;
    }
    case WeightFamily::Custom:
      d = custom_(x);
      break;
  }
  return {sign_ * d.p, sign_ * d.dp, sign_ * d.ddp};
}

double WeightSpec::growth_exponent() const
{
  return alpha_;
}

bool WeightSpec::relaxed_bound() const
{
  return family_ == WeightFamily::KOverLog || family_ == WeightFamily::ScaledOddPower ||
         family_ == WeightFamily::LogPower || family_ == WeightFamily::LogLog;
}

double WeightSpec::growth_constant(std::span<const double> nodes) const
{
  const double c2 = relaxed_bound() ? 1.0 : 0.0;
  double c = 0.0;
  for (double x : nodes)
  {
    const WeightDerivs d = eval(x);
    const double q = 1.0 + x * x;
    const double v[3] = {d.p, d.dp, d.ddp};
    for (int j = 0; j < 3; j++)
    {
      const double excess = std::max(0.0, std::abs(v[j]) - c2);
      c = std::max(c, excess / std::pow(q, 0.5 * (alpha_ - j)));
    }
  }
  return c;
}

std::string WeightSpec::describe() const
{
  std::ostringstream s;
  s.precision(17);
  const char *neg = sign_ < 0.0 ? "-" : "";
  switch (family_)
  {
    case WeightFamily::Zero:
      s << "zero";
      break;
    case WeightFamily::HoShift:
      s << neg << "ho_shift(a=" << a_ << ")";
      break;
    case WeightFamily::OddPower:
      s << neg << "odd_power(alpha=" << alpha_ << ")";
      break;
    case WeightFamily::KOverLog:
      s << neg << "k_over_log(gamma=" << gamma_ << ",beta=" << beta_ << ")";
      break;
    case WeightFamily::ScaledOddPower:
      s << neg << "scaled_odd_power(C1=" << c1_ << ",beta=" << beta_ << ")";
      break;
    case WeightFamily::LogPower:
      s << neg << "log_power(gamma=" << gamma_ << ")";
      break;
    case WeightFamily::LogLog:
      s << neg << "loglog";
      break;
    case WeightFamily::EvenSqrt:
      s << neg << "even_sqrt(a=" << a_ << ")";
      break;
    case WeightFamily::Custom:
      s << neg << "custom(" << name_ << ")";
      break;
  }
  if (phase_)
  {
    s << "+i*" << phase_->name;
  }
  return s.str();
}

std::string WeightSpec::bridge() const
{
  switch (family_)
  {
    case WeightFamily::LogPower:
      return "quintic smoothstep on 1<=|x|<=2, zero on |x|<=1";
    case WeightFamily::LogLog:
      return "quintic smoothstep on e<=|x|<=e^2, zero on |x|<=e";
    case WeightFamily::KOverLog:
      return "log|x| replaced by log(e+|x|)";
    default:
      return "";
  }
}

}  // namespace nsa
