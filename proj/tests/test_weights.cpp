// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>
#include "doctest.h"
#include "nsa/error.hpp"
#include "nsa/weights.hpp"

using namespace nsa;

namespace
{

std::vector<WeightSpec> Catalog()
{
  return {WeightSpec::ho_shift(0.5),           WeightSpec::odd_power(1.0, 4.0),
          WeightSpec::odd_power(2.5, 4.0),     WeightSpec::k_over_log(1.0, 4.0),
          WeightSpec::scaled_odd_power(8.0, 4.0), WeightSpec::log_power(1.0, 4.0),
          WeightSpec::loglog(4.0),             WeightSpec::even_sqrt(1.0)};
}

// Fourth-order central differences.
double Derivative(const WeightSpec &w, double x, bool second)
{
  const double h = 1e-3 * std::max(1.0, std::abs(x));
  if (!second)
  {
    return (-w.eval(x + 2 * h).p + 8 * w.eval(x + h).p - 8 * w.eval(x - h).p + w.eval(x - 2 * h).p) / (12 * h);
  }
  return (-w.eval(x + 2 * h).dp + 8 * w.eval(x + h).dp - 8 * w.eval(x - h).dp + w.eval(x - 2 * h).dp) / (12 * h);
}

}  // namespace

TEST_CASE("analytic derivatives agree with finite differences")
{
  for (const auto &w : Catalog())
  {
    for (double x : {-17.3, -5.1, -2.6, -1.4, -0.3, 0.7, 1.5, 2.2, 3.1, 6.0, 12.5, 30.0})
    {
      const auto d = w.eval(x);
      INFO(w.describe() << " at x = " << x);
      CHECK(d.dp == doctest::Approx(Derivative(w, x, false)).epsilon(1e-7).scale(1.0));
      CHECK(d.ddp == doctest::Approx(Derivative(w, x, true)).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("odd families are exactly odd; even_sqrt is even")
{
  for (const auto &w : Catalog())
  {
    for (double x = 0.0; x < 40.0; x += 0.173)
    {
      if (w.is_odd())
      {
        CHECK(w.eval(-x).p == -w.eval(x).p);
      }
      else
      {
        CHECK(w.eval(-x).p == w.eval(x).p);
      }
    }
  }
  CHECK_FALSE(WeightSpec::even_sqrt(1.0).is_odd());
}

TEST_CASE("bridged families are C^2 at the bridge ends and match the outer formula")
{
  const auto lp = WeightSpec::log_power(1.5, 4.0);
  CHECK(lp.eval(1.0).p == 0.0);
  CHECK(lp.eval(0.5).p == 0.0);
  CHECK(lp.eval(2.0).p == doctest::Approx(1.5 * std::log(2.0)));
  CHECK(lp.eval(7.0).p == doctest::Approx(1.5 * std::log(7.0)));
  const auto ll = WeightSpec::loglog(4.0);
  const double e = std::numbers::e;
  CHECK(ll.eval(e).p == 0.0);
  CHECK(ll.eval(20.0).p == doctest::Approx(std::log(std::log(20.0))));
  for (const auto &[w, x0] : {std::pair{lp, 1.0}, {lp, 2.0}, {ll, e}, {ll, e * e}})
  {
    const auto below = w.eval(x0 - 1e-9), above = w.eval(x0 + 1e-9);
    CHECK(std::abs(below.p - above.p) < 1e-7);
    CHECK(std::abs(below.dp - above.dp) < 1e-7);
    CHECK(std::abs(below.ddp - above.ddp) < 1e-6);
  }
}

TEST_CASE("growth bound constants are finite on a wide grid")
{
  std::vector<double> nodes;
  for (double x = -200.0; x <= 200.0; x += 0.05)
  {
    nodes.push_back(x);
  }
  for (const auto &w : Catalog())
  {
    const double c = w.growth_constant(nodes);
    INFO(w.describe());
    CHECK(std::isfinite(c));
    CHECK(c < 10.0);
  }
  // The stated exponent is sharp: odd_power with a smaller exponent in the check blows up.
  const auto w = WeightSpec::odd_power(2.0, 4.0);
  CHECK(w.growth_exponent() == 2.0);
}

TEST_CASE("p -> -p and parameter gates")
{
  const auto w = WeightSpec::odd_power(1.0, 4.0);
  CHECK(w.negated().eval(1.3).p == -w.eval(1.3).p);
  CHECK(w.negated().negated().eval(1.3).p == w.eval(1.3).p);
  CHECK_THROWS_AS(WeightSpec::odd_power(3.0, 4.0), InvalidArgument);
  CHECK_THROWS_AS(WeightSpec::odd_power(1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(WeightSpec::k_over_log(0.0, 4.0), InvalidArgument);
  CHECK(WeightSpec::ho_shift(0.0).is_zero());
  CHECK(WeightSpec::zero().eval(3.0).p == 0.0);
  CHECK(w.with_phase(PhaseFunction::sine()).describe() == "odd_power(alpha=1)+i*sin(x)");
  CHECK(WeightSpec::log_power(1.0, 4.0).bridge() != "");
}
