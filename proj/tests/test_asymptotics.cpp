// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include "doctest.h"
#include "nsa/asymptotics.hpp"
#include "nsa/error.hpp"
#include "oracles/lg_ode.hpp"

using namespace nsa;

namespace
{

constexpr double kPi = std::numbers::pi;

// Omega_beta = B(1/beta, 3/2)/beta via t = x^beta.
double OmegaBetaFunction(double beta)
{
  return boost::math::beta(1.0 / beta, 1.5) / beta;
}

// Second, unrelated quadrature of the defining integral.
double OmegaTanhSinh(double beta)
{
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([&](double y) { return std::sqrt(1.0 - std::pow(y, beta)); }, 0.0,
                              1.0);
}

}  // namespace

TEST_CASE("omega_beta examples")
{
  CHECK(std::abs(omega_beta(2.0) - kPi / 4.0) < 1e-12);
  CHECK(omega_beta(100.0) > 0.98);
  double previous = 0.0;
  for (double beta : {1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0})
  {
    const double w = omega_beta(beta);
    CHECK(w > previous);
    CHECK(w < 1.0);
    previous = w;
  }
  // The substitution identity is first confirmed against an independent quadrature.
  CHECK(std::abs(OmegaBetaFunction(4.0) - OmegaTanhSinh(4.0)) < 1e-12);
  CHECK(std::abs(omega_beta(4.0) - OmegaBetaFunction(4.0)) < 1e-10);
}

TEST_CASE("omega_beta agrees with the Beta-function oracle")
{
  for (double beta : {0.5, 2.5, 3.0, 4.0, 6.0, 10.0})
  {
    CHECK(std::abs(omega_beta(beta) - OmegaBetaFunction(beta)) < 1e-12);
  }
  // Higher-order kinetic term: int (1 - y^beta)^{1/4} dy = B(1/beta, 5/4)/beta.
  CHECK(std::abs(omega_beta(4.0, 2) - boost::math::beta(0.25, 1.25) / 4.0) < 1e-12);
  CHECK_THROWS_AS(omega_beta(0.0), InvalidArgument);
}

TEST_CASE("WKB law")
{
  for (int k = 0; k < 200; k++)
  {
    CHECK(wkb_eigenvalue(k, 2.0) == 2.0 * k + 1.0);
    CHECK(wkb_law(2.0).lambda_of_k(k) == doctest::Approx(2.0 * k + 1.0).epsilon(1e-13));
  }
  for (double beta : {2.5, 4.0, 6.0})
  {
    const auto law = wkb_law(beta);
    CHECK(law.exponent() == doctest::Approx(2.0 * beta / (2.0 + beta)));
    for (int k : {0, 3, 50, 1000})
    {
      CHECK(std::abs(law.k_of_lambda(law.lambda_of_k(k)) - k) < 1e-10);
    }
  }
  // Phase-integral check: int (lambda - |x|^4)^{1/2} dx = (k + 1/2) pi.
  const double lam = wkb_eigenvalue(17, 4.0);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double X = std::pow(lam, 0.25);
  const double phase = 2.0 * integrator.integrate(
                                 [&](double x) { return std::sqrt(std::max(0.0, lam - std::pow(x, 4))); },
                                 0.0, X);
  CHECK(phase == doctest::Approx(17.5 * kPi).epsilon(1e-10));
}

TEST_CASE("ho_projection_asymptotic")
{
  const double expected = 2.0 * std::sqrt(2.0) * 10.0 - std::log(2.0 * std::pow(200.0, 0.25) * std::sqrt(kPi));
  CHECK(ho_projection_asymptotic(100, 1.0).log_mag == doctest::Approx(expected).epsilon(1e-14));
  CHECK(ho_projection_asymptotic(100, -1.0).log_mag == ho_projection_asymptotic(100, 1.0).log_mag);
  CHECK_THROWS_AS(ho_projection_asymptotic(10, 0.0), InvalidArgument);
  double previous = ho_projection_asymptotic(2, 0.5).log_mag;
  for (int k = 3; k < 2000; k++)
  {
    const double v = ho_projection_asymptotic(k, 0.5).log_mag;
    CHECK(v > previous);
    previous = v;
  }
  const double exact = 1.0 + laguerre_log(400, -2.0).log_mag;
  const double ratio = std::exp(exact - ho_projection_asymptotic(400, 1.0).log_mag);
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
}

TEST_CASE("Theorem-2 asymptotic ratio converges like k^{-1/2}")
{
  for (double a : {0.5, 1.0})
  {
    double c_max = 0.0;
    for (int k = 25; k <= 1000; k += 25)
    {
      const double exact = a * a + laguerre_log(k, -2.0 * a * a).log_mag;
      const double r = std::exp(exact - ho_projection_asymptotic(k, a).log_mag);
      c_max = std::max(c_max, std::abs(r - 1.0) * std::sqrt(double(k)));
    }
    MESSAGE("a = " << a << ": fitted C in |ratio - 1| <= C/sqrt(k) is " << c_max);
    CHECK(c_max < 2.0);
  }
}

TEST_CASE("laguerre_asymptotic")
{
  const double r = std::exp(laguerre_log(400, -2.0).log_mag - laguerre_asymptotic(400, -2.0).log_mag);
  CHECK(std::abs(r - 1.0) < 0.1);
  for (double a : {0.3, 1.0, 2.0})
  {
    for (int k : {1, 10, 333})
    {
      CHECK(std::abs(a * a + laguerre_asymptotic(k, -2.0 * a * a).log_mag -
                     ho_projection_asymptotic(k, a).log_mag) < 1e-10);
    }
  }
  CHECK(laguerre_asymptotic(1, -0.5).sign == 1);
  CHECK_THROWS_AS(laguerre_asymptotic(5, 0.0), InvalidArgument);
}

TEST_CASE("theorem3_constants")
{
  const auto c = theorem3_constants(1.0, 4.0);
  CHECK(c.sigma == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(c.c == doctest::Approx(2.0 * std::pow(kPi / (2.0 * OmegaBetaFunction(4.0)), 1.0 / 3.0)).epsilon(1e-12));
  CHECK(theorem3_constants(1e-9, 4.0).sigma < 1e-8);
  CHECK(theorem3_constants(3.0 - 1e-9, 4.0).sigma > 1.0 - 1e-8);
  CHECK_THROWS_AS(theorem3_constants(3.0, 4.0), InvalidArgument);
  CHECK_THROWS_AS(theorem3_constants(0.0, 4.0), InvalidArgument);
  CHECK_THROWS_AS(theorem3_constants(1.0, 2.0), InvalidArgument);
}

TEST_CASE("example_rates")
{
  const auto lp = example_rates(ExampleFamily::LogPower, 4.0, 1.0);
  CHECK(lp.omega == doctest::Approx(2.0 / 3.0));
  CHECK(lp.limit == doctest::Approx(2.0 * std::pow(2.0 * omega_beta(4.0) / kPi, 2.0 / 3.0)));
  CHECK(lp.ratio(300.0, std::log(lp.limit) + lp.omega * std::log(300.0)) == doctest::Approx(lp.limit));
  CHECK(lp.theory_log_norm(300.0) == doctest::Approx(std::log(lp.limit * std::pow(300.0, 2.0 / 3.0))));

  const auto ll = example_rates(ExampleFamily::LogLog, 4.0);
  CHECK(ll.limit == 3.0);
  CHECK(ll.ratio(100.0, std::log(3.0 * std::log(100.0))) == doctest::Approx(3.0));

  const auto kl = example_rates(ExampleFamily::KOverLog, 4.0, 2.0);
  CHECK(kl.limit == doctest::Approx(omega_beta(4.0) / (kPi * 9.0)));
  CHECK(kl.comparator(100.0) == doctest::Approx(100.0 / std::pow(std::log(100.0), 2.0)));
  CHECK(kl.ratio(100.0, kl.theory_log_norm(100.0)) == doctest::Approx(kl.limit));
  CHECK_THROWS_AS(example_rates(ExampleFamily::KOverLog, 4.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(example_rates(ExampleFamily::LogLog, 2.0), InvalidArgument);
}

TEST_CASE("even_p_asymptotic")
{
  const double n = 0.37;
  const double expected = 10.0 - 0.375 * std::log(100.0) - 0.25 * std::log(kPi) + std::log(n);
  CHECK(even_p_asymptotic(50, 1.0, n).log_mag == doctest::Approx(expected).epsilon(1e-14));
  CHECK(even_p_asymptotic(50, 1.0, 2.0 * n).to_double() ==
        doctest::Approx(2.0 * even_p_asymptotic(50, 1.0, n).to_double()).epsilon(1e-14));
  CHECK_THROWS_AS(even_p_asymptotic(50, 0.0, n), InvalidArgument);
  // int e^{-2a sqrt(1+x^2)} dx = 2 K_1(2a).
  for (double a : {0.05, 0.5, 1.0, 3.0})
  {
    const double ref = std::sqrt(2.0 * boost::math::cyl_bessel_k(1, 2.0 * a));
    CHECK(even_p_norm_exp_minus_p(a) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("higher_order_rate")
{
  const auto r = higher_order_rate(2, 1.0);
  CHECK(r.exponent == doctest::Approx(1.0 / 3.0));
  CHECK(r.constant == doctest::Approx(2.0 * std::pow(kPi / (2.0 * omega_beta(4.0)), 1.0 / 3.0)));
  const auto r1 = higher_order_rate(1, 0.7);
  CHECK(r1.exponent == 0.5);
  CHECK(r1.constant == doctest::Approx(std::pow(2.0, 1.5) * 0.7).epsilon(1e-12));
  CHECK(higher_order_rate(3, 2.5).constant == doctest::Approx(2.5 * higher_order_rate(3, 1.0).constant));
}

TEST_CASE("Liouville-Green variation and admissible R")
{
  for (double beta : {2.5, 4.0, 6.0})
  {
    for (double mu : {-20.0, -1.0, 0.0, 1.0, 10.0, 50.0})
    {
      const double r = lg_minimal_R(beta, mu);
      CHECK(lg_variation(beta, mu, r, INFINITY) == doctest::Approx(0.5).epsilon(1e-9));
      // Closed form against tanh-sinh quadrature of |F'|.
      const double c = beta * beta / 16.0 + beta / 4.0;
      boost::math::quadrature::tanh_sinh<double> integrator;
      auto abs_fprime = [&](double t)
      { return std::abs(c * std::pow(t, -2.0 - 0.5 * beta) + mu * std::pow(t, -0.5 * beta)); };
      // Split at the sign change of F' so the quadrature sees smooth pieces.
      const double t0 = mu < 0.0 ? std::sqrt(-c / mu) : 0.0;
      const double quad = (t0 > r && t0 < 3.0 * r)
                              ? integrator.integrate(abs_fprime, r, t0) + integrator.integrate(abs_fprime, t0, 3.0 * r)
                              : integrator.integrate(abs_fprime, r, 3.0 * r);
      CHECK(lg_variation(beta, mu, r, 3.0 * r) == doctest::Approx(quad).epsilon(1e-9));

      const auto lg = lg_approximant(beta, mu, r);
      CHECK(lg.error_bound(INFINITY) <= std::exp(0.25) - 1.0 + 1e-12);
      CHECK(lg.error_bound(INFINITY) < 0.5);
      double previous = 0.0;
      for (double x = r; x < 10.0 * r; x *= 1.3)
      {
        CHECK(lg.error_bound(x) >= previous);
        previous = lg.error_bound(x);
      }
      // Larger R: smaller bound at infinity.
      CHECK(lg_approximant(beta, mu, 2.0 * r).error_bound(INFINITY) <= lg.error_bound(INFINITY));
      CHECK_THROWS_AS(lg_approximant(beta, mu, 0.5 * r), InvalidArgument);
    }
  }
}

TEST_CASE("w_plus w_minus product decays like x^{-beta/2}")
{
  const auto lg = lg_approximant(4.0, 10.0, lg_minimal_R(4.0, 10.0));
  for (double x = lg.R; x < 5.0 * lg.R; x *= 1.7)
  {
    const double log_product = (lg.w_plus(x) * lg.w_minus(x)).log_mag;
    CHECK(log_product == doctest::Approx(-2.0 * std::log(x)).epsilon(1e-12));
  }
}

TEST_CASE("Liouville-Green bound holds against the Riccati oracle")
{
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> beta_dist(2.5, 6.0), mu_dist(1.0, 50.0);
  for (int trial = 0; trial < 20; trial++)
  {
    const double beta = beta_dist(rng), mu = mu_dist(rng);
    const auto lg = lg_approximant(beta, mu, lg_minimal_R(beta, mu));
    std::vector<double> xs;
    for (int i = 1; i <= 40; i++)
    {
      xs.push_back(lg.R * (1.0 + 2.0 * i / 40.0));
    }
    const auto plus = oracle::LgPlusDeviation(beta, mu, lg.R, xs);
    // Far start where the remaining variation is negligible.
    double x_far = 3.0 * lg.R;
    while (lg.variation(x_far, INFINITY) > 1e-6 * lg.variation(lg.R, INFINITY))
    {
      x_far *= 2.0;
    }
    std::vector<double> back(xs.rbegin(), xs.rend());
    back.push_back(lg.R);
    auto minus = oracle::LgMinusDeviation(beta, mu, x_far, back);
    for (std::size_t i = 0; i < xs.size(); i++)
    {
      CHECK(plus[i] <= lg.error_bound(xs[i]));
      CHECK(minus[xs.size() - 1 - i] <= lg.error_bound_minus(xs[i]));
    }
  }
}

TEST_CASE("Liouville-Green recessive solution against direct RK4 (beta 4, mu 10)")
{
  const auto lg = lg_approximant(4.0, 10.0, lg_minimal_R(4.0, 10.0));
  const double x_start = 4.0 * lg.R;
  std::vector<double> xs;
  for (int i = 0; i <= 20; i++)
  {
    xs.push_back(2.0 * lg.R - i * lg.R / 20.0);
  }
  const auto logw = oracle::Rk4RecessiveLog(4.0, 10.0, x_start, xs);
  const double ref_start = lg.w_minus(x_start).log_mag;
  for (std::size_t i = 0; i < xs.size(); i++)
  {
    // Both solutions normalized to agree at x_start.
    const double dev = std::abs(std::expm1(logw[i] - (lg.w_minus(xs[i]).log_mag - ref_start) -
                                           (-std::pow(x_start, 3.0) / 3.0 - std::log(x_start))));
    CHECK(dev <= lg.error_bound_minus(xs[i]));
    CHECK(dev > 0.0);
  }
}
