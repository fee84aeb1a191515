// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include "doctest.h"
#include "nsa/asymptotics.hpp"
#include "nsa/error.hpp"
#include "nsa/schrodinger.hpp"
#include "nsa/specfun.hpp"

using namespace nsa;
using C = std::complex<double>;

namespace
{

OscillatorSpec Spec(double beta, int k, double ppw = 60.0)
{
  OscillatorSpec s;
  s.beta = beta;
  s.num_modes = k;
  s.points_per_wavelength = ppw;
  return s;
}

// Eigenvalues of L identified by the dense solve on grid, then followed onto h/2 and h/4
// by shift-and-invert and Richardson-combined.
std::vector<C> LEigenvalues(const OscillatorSpec &spec, const Grid &grid, const WeightSpec &w,
                            std::size_t count)
{
  const auto dense = eigensolve_L(assemble_L(spec, grid, w), count);
  const Grid g1 = grid.refined(), g2 = g1.refined();
  const auto l1 = assemble_L(spec, g1, w), l2 = assemble_L(spec, g2, w);
  std::vector<C> out(count);
  for (std::size_t j = 0; j < count; j++)
  {
    double r1 = 0.0, r2 = 0.0;
    const C e1 = refine_eigenvalue(l1, dense.eigenvalues[j], r1);
    const C e2 = refine_eigenvalue(l2, e1, r2);
    out[j] = (4.0 * e2 - e1) / 3.0;
  }
  return out;
}

}  // namespace

TEST_CASE("build_grid follows the sizing formulas")
{
  OscillatorSpec s = Spec(2.0, 10, 8.0);
  const Grid g = build_grid(s, 101.0);
  CHECK(g.half_width == doctest::Approx(1.5 * std::sqrt(101.0)).epsilon(1e-14));
  CHECK(g.half_width == doctest::Approx(15.07).epsilon(1e-3));
  CHECK(g.step <= 2.0 * std::numbers::pi / (8.0 * std::sqrt(101.0)));
  CHECK(g.step <= 0.0782);
  CHECK(g.size() % 2 == 1);
  CHECK(g.nodes[g.size() / 2] == 0.0);
  for (std::size_t i = 0; i < g.size(); i++)
  {
    CHECK(g.nodes[i] == -g.nodes[g.size() - 1 - i]);
  }

  const Grid g4 = build_grid(Spec(4.0, 10, 8.0), 16.0);
  CHECK(g4.half_width == doctest::Approx(3.0).epsilon(1e-14));

  CHECK_THROWS_AS(build_grid(s, 0.0), InvalidArgument);
  s.max_nodes = 100;
  CHECK_THROWS_AS(build_grid(s, 101.0), InvalidArgument);

  const Grid r = g.refined();
  CHECK(r.size() == 2 * g.size() - 1);
  for (std::size_t i = 0; i < g.size(); i++)
  {
    CHECK(r.nodes[2 * i] == doctest::Approx(g.nodes[i]).epsilon(1e-15));
  }
}

TEST_CASE("assemble_T stencil, symmetry and potential")
{
  Grid toy;
  toy.half_width = 1.0;
  toy.step = 1.0;
  toy.nodes = {-1.0, 0.0, 1.0};
  const auto t = assemble_T(Spec(2.0, 1), toy);
  CHECK(t(0, 0) == 3.0);
  CHECK(t(1, 1) == 2.0);
  CHECK(t(2, 2) == 3.0);
  CHECK(t(0, 1) == -1.0);
  CHECK(t(1, 2) == -1.0);

  const Grid g = build_grid(Spec(4.0, 5, 8.0), 16.0);
  for (int order : {2, 4, 6})
  {
    OscillatorSpec s = Spec(4.0, 5, 8.0);
    s.deriv_order = order;
    const auto a = assemble_T(s, g);
    CHECK(a.lower() == order / 2);
    for (std::size_t i = 0; i < g.size(); i++)
    {
      for (std::size_t j = 0; j < g.size(); j++)
      {
        REQUIRE(a.get(i, j) == a.get(j, i));
      }
    }
  }
  const auto a = assemble_T(Spec(4.0, 5, 8.0), g);
  const std::size_t i2 = g.size() - 1;  // x = 3 is the end; find x = 2 exactly if present
  for (std::size_t i = 0; i < g.size(); i++)
  {
    if (g.nodes[i] == 2.0)
    {
      CHECK(a(i, i) == doctest::Approx(2.0 / (g.step * g.step) + 16.0).epsilon(1e-15));
    }
  }
  CHECK(a(i2, i2) == doctest::Approx(2.0 / (g.step * g.step) + 81.0).epsilon(1e-15));
}

TEST_CASE("harmonic oscillator eigenpairs match 2k+1 and the Hermite functions")
{
  const TSolution sol = solve_T(Spec(2.0, 10));
  REQUIRE(sol.pairs.size() == 10);
  const auto rule = sol.grid.trapezoid();
  for (const auto &p : sol.pairs)
  {
    CHECK(std::abs(p.lambda / (2.0 * p.k + 1.0) - 1.0) < 1e-6);
    CHECK(p.sign_changes == p.k);
    double sup = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); i++)
    {
      sup = std::max(sup, std::abs(p.u[i] - hermite_h(p.k, sol.grid.nodes[i])));
      norm += rule.weights[i] * p.u[i] * p.u[i];
    }
    CHECK(sup < 1e-6);
    CHECK(std::abs(norm - 1.0) < 1e-12);
    CHECK(p.parity_defect < 1e-8);
    CHECK(p.lambda_error > 0.0);
  }
}

TEST_CASE("beta = 4 eigenvalues follow the WKB law")
{
  const TSolution sol = solve_T(Spec(4.0, 51));
  for (const auto &p : sol.pairs)
  {
    CHECK(p.sign_changes == p.k);
    if (p.k >= 10)
    {
      CHECK(std::abs(wkb_eigenvalue(p.k, 4.0) / p.lambda - 1.0) < 0.01);
    }
    if (p.k > 0)
    {
      CHECK(p.lambda > sol.pairs[p.k - 1].lambda);
    }
  }
}

TEST_CASE("second-order convergence under grid refinement")
{
  OscillatorSpec s = Spec(4.0, 12, 10.0);
  s.richardson = false;
  const Grid g0 = build_grid(s, wkb_law(4.0).lambda_of_k(12));
  const Grid g1 = g0.refined();
  const Grid g2 = g1.refined();
  const auto e0 = eigensolve_T(s, g0), e1 = eigensolve_T(s, g1), e2 = eigensolve_T(s, g2);
  for (std::size_t k = 0; k < e0.size(); k++)
  {
    const double ratio = (e0[k].lambda - e1[k].lambda) / (e1[k].lambda - e2[k].lambda);
    CHECK(ratio > 3.8);
    CHECK(ratio < 4.2);
  }
}

TEST_CASE("higher-order kinetic term")
{
  OscillatorSpec s = Spec(4.0, 20);
  s.deriv_order = 4;
  const TSolution sol = solve_T(s);
  const WkbResult law = wkb_law(4.0, 2);
  for (const auto &p : sol.pairs)
  {
    if (p.k >= 10)
    {
      CHECK(std::abs(law.lambda_of_k(p.k) / p.lambda - 1.0) < 0.01);
    }
    CHECK(p.parity_defect < 1e-6);
  }
}

TEST_CASE("discrete graph-norm bound with constant 2")
{
  const OscillatorSpec s = Spec(4.0, 5, 12.0);
  const Grid g = build_grid(s, 200.0);
  const auto t = assemble_T(s, g);
  const std::size_t n = g.size();
  const double h = g.step;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 50; trial++)
  {
    // Smooth bump (1 - ((x - c)/r)^2)^4 cos(w x), compactly supported inside the grid.
    const double c = (u01(rng) - 0.5) * g.half_width;
    const double r = 0.2 + u01(rng) * (g.half_width - std::abs(c) - 0.1);
    const double w = 10.0 * u01(rng);
    std::vector<double> f(n), tf(n);
    for (std::size_t i = 0; i < n; i++)
    {
      const double y = (g.nodes[i] - c) / r;
      f[i] = std::abs(y) < 1.0 ? std::pow(1.0 - y * y, 4) * std::cos(w * g.nodes[i]) : 0.0;
    }
    t.multiply(f, tf);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      const double fm = i > 0 ? f[i - 1] : 0.0, fp = i + 1 < n ? f[i + 1] : 0.0;
      const double d2 = (fm - 2.0 * f[i] + fp) / (h * h);
      const double v = std::pow(std::abs(g.nodes[i]), 4.0) * f[i];
      lhs += h * (tf[i] * tf[i] + f[i] * f[i]);
      rhs += h * 2.0 * (d2 * d2 + v * v + f[i] * f[i]);
    }
    CHECK(lhs <= rhs * (1.0 + 1e-6));
  }
}

TEST_CASE("L with p = 0 is T")
{
  const OscillatorSpec s = Spec(4.0, 8, 10.0);
  const Grid g = build_grid(s, 60.0);
  const auto t = assemble_T(s, g);
  const auto l = assemble_L(s, g, WeightSpec::zero());
  for (std::size_t i = 0; i < g.size(); i++)
  {
    for (std::size_t j = 0; j < g.size(); j++)
    {
      REQUIRE(l.get(i, j) == C(t.get(i, j)));
    }
  }
  const auto spec = eigensolve_L(l, 8);
  const auto sym = eigensolve_T(s, g);
  for (std::size_t k = 0; k < 8; k++)
  {
    CHECK(std::abs(spec.eigenvalues[k] - sym[k].lambda) < 1e-10 * sym[k].lambda);
    CHECK(spec.residuals[k] < 1e-8 * sym[k].lambda);
  }
}

TEST_CASE("harmonic-oscillator shift: eigenvalues 1 + 2k + a^2")
{
  const double a = 0.5;
  const OscillatorSpec s = Spec(2.0, 10, 10.0);
  const WeightSpec w = WeightSpec::ho_shift(a);
  const Grid g = build_grid(s, 23.0, decay_half_width(2.0, 23.0, w));
  REQUIRE(g.size() <= 2500);
  const auto coarse = eigensolve_L(assemble_L(s, g, w), 10);
  const auto ev = LEigenvalues(s, g, w, 10);
  for (int k = 0; k < 10; k++)
  {
    CHECK(std::abs(coarse.eigenvalues[k].imag()) < 1e-6);
    CHECK(std::abs(ev[k] - (1.0 + 2.0 * k + a * a)) < 1e-5 * (1.0 + 2.0 * k + a * a));
  }
  CHECK_THROWS_AS(assemble_L(Spec(4.0, 5), g, w), InvalidArgument);
}

TEST_CASE("beta = 4, odd power weight: spectrum of L equals spectrum of T")
{
  const OscillatorSpec s = Spec(4.0, 15, 10.0);
  const WeightSpec w = WeightSpec::odd_power(1.0, 4.0);
  const double lam = wkb_law(4.0).lambda_of_k(15);
  const Grid g = build_grid(s, lam, decay_half_width(4.0, lam, w));
  REQUIRE(g.size() <= 2500);
  const auto l = eigensolve_L(assemble_L(s, g, w), 15);
  OscillatorSpec sr = s;
  sr.richardson = false;
  const auto t = eigensolve_T(sr, g);
  const auto tf = eigensolve_T(sr, g.refined());
  for (std::size_t k = 0; k < 15; k++)
  {
    const double err = std::abs(t[k].lambda - tf[k].lambda) * 4.0 / 3.0;
    CHECK(std::abs(l.eigenvalues[k] - t[k].lambda) <= 10.0 * err);
    CHECK(std::abs(l.eigenvalues[k].imag()) <= 10.0 * err);
    if (k > 0)
    {
      CHECK(std::abs(l.eigenvalues[k] - l.eigenvalues[k - 1]) >
            0.5 * (t[k].lambda - t[k - 1].lambda));
    }
  }
}

TEST_CASE("L rejects mismatched weights and oversized dense solves")
{
  const OscillatorSpec s = Spec(4.0, 5, 10.0);
  const Grid g = build_grid(s, 40.0);
  CHECK_THROWS_AS(assemble_L(s, g, WeightSpec::odd_power(1.0, 6.0)), InvalidArgument);
  OscillatorSpec s4 = s;
  s4.deriv_order = 4;
  CHECK_THROWS_AS(assemble_L(s4, g, WeightSpec::odd_power(1.0, 4.0)), InvalidArgument);
  CHECK_THROWS_AS(eigensolve_L(assemble_L(s, g, WeightSpec::zero()), 3, 10), InvalidArgument);
}

TEST_CASE("discrete Fourier transform")
{
  OscillatorSpec s = Spec(2.0, 10, 8.0);
  const Grid g = build_grid(s, 400.0);  // X = 30, well past the decay of h_k for k < 10
  std::vector<C> gauss(g.size());
  for (std::size_t i = 0; i < g.size(); i++)
  {
    gauss[i] = std::exp(-0.5 * g.nodes[i] * g.nodes[i]);
  }
  const auto ft = fourier_on_grid(gauss, g);
  CHECK_FALSE(ft.wrapped);
  double dev = 0.0;
  for (std::size_t j = 0; j < g.size(); j++)
  {
    dev = std::max(dev, std::abs(ft.values[j] - std::exp(-0.5 * ft.xi[j] * ft.xi[j])));
  }
  CHECK(dev < 1e-8);

  const C mi(0.0, -1.0);
  for (int k = 0; k < 10; k++)
  {
    std::vector<C> hk(g.size());
    for (std::size_t i = 0; i < g.size(); i++)
    {
      hk[i] = hermite_h(k, g.nodes[i]);
    }
    const auto hf = fourier_on_grid(hk, g);
    double d = 0.0, n0 = 0.0, n1 = 0.0;
    const double dxi = hf.xi[1] - hf.xi[0];
    for (std::size_t j = 0; j < g.size(); j++)
    {
      d = std::max(d, std::abs(hf.values[j] - std::pow(mi, k) * hermite_h(k, hf.xi[j])));
      n0 += g.step * std::norm(hk[j]);
      n1 += dxi * std::norm(hf.values[j]);
    }
    CHECK(d < 1e-6);
    CHECK(std::abs(n1 / n0 - 1.0) < 1e-10);
  }

  std::vector<C> flat(g.size(), C(1.0));
  CHECK(fourier_on_grid(flat, g).wrapped);
}

TEST_CASE("binary cache round trip")
{
  const auto dir = std::filesystem::temp_directory_path() / "nsa_cache_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "solve");
  const OscillatorSpec s = Spec(4.0, 6, 10.0);
  const TSolution a = solve_T(s);
  const std::string path = (dir / cache_key(s, a.grid)).string();
  write_cache(path, s, a.grid, a.pairs);
  Grid g;
  std::vector<EigenPair> pairs;
  REQUIRE(read_cache(path, s, g, pairs));
  CHECK(g.nodes == a.grid.nodes);
  CHECK(g.step == doctest::Approx(a.grid.step).epsilon(1e-14));
  REQUIRE(pairs.size() == a.pairs.size());
  for (std::size_t k = 0; k < pairs.size(); k++)
  {
    CHECK(pairs[k].lambda == a.pairs[k].lambda);
    CHECK(pairs[k].lambda_error == a.pairs[k].lambda_error);
    CHECK(pairs[k].u == a.pairs[k].u);
  }
  OscillatorSpec other = s;
  other.beta = 6.0;
  CHECK_FALSE(read_cache(path, other, g, pairs));
  CHECK_FALSE(read_cache((dir / "missing.bin").string(), s, g, pairs));

  setenv("NSA_CACHE_DIR", (dir / "solve").c_str(), 1);
  const TSolution b = solve_T(s);
  const TSolution c = solve_T(s);
  unsetenv("NSA_CACHE_DIR");
  CHECK_FALSE(b.from_cache);
  CHECK(c.from_cache);
  CHECK(c.pairs.back().lambda == b.pairs.back().lambda);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sign changes and weights that outgrow the decay")
{
  const std::vector<double> v = {0.0, 1.0, -1.0, 1e-14, 2.0, -3.0};
  CHECK(count_sign_changes(v) == 3);
  CHECK_NOTHROW(decay_half_width(4.0, 100.0, WeightSpec::odd_power(1.0, 4.0)));
  CHECK_THROWS_AS(decay_half_width(4.0, 100.0, WeightSpec::scaled_odd_power(0.5, 4.0)),
                  InvalidArgument);
}
