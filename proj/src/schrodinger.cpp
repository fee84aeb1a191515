// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include "nsa/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <Eigen/Dense>
#include "nsa/asymptotics.hpp"
#include "nsa/error.hpp"
#include "nsa/parallel.hpp"

namespace nsa
{

namespace
{

// Product of two band matrices; bandwidths add.
BandMatrix<double> BandProduct(const BandMatrix<double> &a, const BandMatrix<double> &b)
{
  const std::size_t n = a.size();
  BandMatrix<double> c(n, a.lower() + b.lower(), a.upper() + b.upper());
  for (std::size_t i = 0; i < n; i++)
  {
    const std::size_t k0 = i >= static_cast<std::size_t>(a.lower()) ? i - a.lower() : 0;
    const std::size_t k1 = std::min(n - 1, i + a.upper());
    for (std::size_t k = k0; k <= k1; k++)
    {
      const std::size_t j0 = k >= static_cast<std::size_t>(b.lower()) ? k - b.lower() : 0;
      const std::size_t j1 = std::min(n - 1, k + b.upper());
      for (std::size_t j = j0; j <= j1; j++)
      {
        c(i, j) += a(i, k) * b(k, j);
      }
    }
  }
  return c;
}

void TrapezoidNormalize(std::vector<double> &u, double h)
{
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); i++)
  {
    const double wi = (i == 0 || i + 1 == u.size()) ? 0.5 * h : h;
    s += wi * u[i] * u[i];
  }
  const double inv = 1.0 / std::sqrt(s);
  for (auto &x : u)
  {
    x *= inv;
  }
}

// Positive at the rightmost interior local extremum of |u| that is not tail noise.
void FixSign(std::vector<double> &u)
{
  double m = 0.0;
  for (double x : u)
  {
    m = std::max(m, std::abs(x));
  }
  for (std::size_t i = u.size() - 1; i-- > 1;)
  {
    const double a = std::abs(u[i]);
    if (a >= 1e-3 * m && a >= std::abs(u[i - 1]) && a >= std::abs(u[i + 1]))
    {
      if (u[i] < 0.0)
      {
        for (auto &x : u)
        {
          x = -x;
        }
      }
      return;
    }
  }
}

double ParityDefect(const std::vector<double> &u)
{
  double d = 0.0;
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n / 2; i++)
  {
    d = std::max(d, std::abs(std::abs(u[i]) - std::abs(u[n - 1 - i])));
  }
  return d;
}

void Finish(EigenPair &pair, double h)
{
  TrapezoidNormalize(pair.u, h);
  FixSign(pair.u);
  pair.sign_changes = count_sign_changes(pair.u);
  pair.parity_defect = ParityDefect(pair.u);
}

}  // namespace

void OscillatorSpec::validate() const
{
  NSA_REQUIRE(std::isfinite(beta) && beta > 0.0, "beta must be positive");
  NSA_REQUIRE(deriv_order >= 2 && deriv_order % 2 == 0, "derivative order must be even and >= 2");
  NSA_REQUIRE(num_modes >= 1, "need at least one mode");
  NSA_REQUIRE(margin >= 1.2, "margin must be >= 1.2 (grid must cover the turning point)");
  NSA_REQUIRE(points_per_wavelength >= 6.0, "points per wavelength must be >= 6");
  NSA_REQUIRE(max_nodes >= 3, "node cap must allow at least 3 nodes");
}

Grid Grid::refined() const
{
  Grid g;
  g.half_width = half_width;
  g.step = 0.5 * step;
  const long n_half = 2 * static_cast<long>((size() - 1) / 2);
  g.nodes.resize(2 * n_half + 1);
  for (long i = 0; i <= 2 * n_half; i++)
  {
    g.nodes[i] = static_cast<double>(i - n_half) * g.step;
  }
  return g;
}

Grid build_grid(const OscillatorSpec &spec, double lambda_max_estimate, double min_half_width)
{
  spec.validate();
  NSA_REQUIRE(std::isfinite(lambda_max_estimate) && lambda_max_estimate > 0.0,
              "eigenvalue estimate must be positive");
  const double x = std::max(spec.margin * std::pow(lambda_max_estimate, 1.0 / spec.beta),
                            min_half_width);
  const double h_max = 2.0 * std::numbers::pi /
                       (spec.points_per_wavelength *
                        std::pow(lambda_max_estimate, 1.0 / spec.deriv_order));
  const double n_half = std::ceil(x / h_max);
  NSA_REQUIRE(2.0 * n_half + 1.0 <= static_cast<double>(spec.max_nodes),
              "grid needs " + std::to_string(static_cast<long long>(2.0 * n_half + 1.0)) +
                  " nodes, above the cap of " + std::to_string(spec.max_nodes) +
                  "; reduce K or points per wavelength");
  Grid g;
  g.half_width = x;
  g.step = x / n_half;
  const long nh = static_cast<long>(n_half);
  g.nodes.resize(2 * nh + 1);
  for (long i = 0; i <= 2 * nh; i++)
  {
    g.nodes[i] = static_cast<double>(i - nh) * g.step;
  }
  return g;
}

double decay_half_width(double beta, double lambda, const WeightSpec &w, int m)
{
  NSA_REQUIRE(lambda > 0.0 && beta > 0.0 && m >= 1, "decay_half_width needs lambda, beta > 0");
  // Track 2 max(|p(x)|, |p(-x)|) - 2 S(x), S the WKB decay exponent from the turning point,
  // and stop once it has fallen 45 below its running maximum (1e-16 of peak plus slack for
  // the WKB prefactor).
  const double xt = std::pow(lambda, 1.0 / beta);
  const double dx = xt / 400.0;
  // Exponential solutions e^{zx} of D^{2m} u = -Q u (Q = x^beta - lambda > 0) have
  // z^{2m} = (-1)^{m+1} Q; the slowest-decaying one sets the rate relative to Q^{1/(2m)}.
  double decay_rate = 1.0;
  for (int j = 0; j < 2 * m; j++)
  {
    decay_rate = std::min(decay_rate, std::abs(std::cos(std::numbers::pi * (m + 1 + 2 * j) /
                                                        (2.0 * m))));
  }
  auto weight = [&](double x) { return 2.0 * std::max(std::abs(w.p(x)), std::abs(w.p(-x))); };
  double s = 0.0;
  double best = weight(xt);
  double x = xt;
  for (int it = 0; it < 400 * 60; it++)
  {
    const double mid = x + 0.5 * dx;
    s += dx * decay_rate * std::pow(std::pow(mid, beta) - lambda, 1.0 / (2.0 * m));
    x += dx;
    const double v = weight(x) - 2.0 * s;
    best = std::max(best, v);
    if (v < best - 45.0)
    {
      return x;
    }
  }
  throw InvalidArgument("weight " + w.describe() +
                        " outgrows the eigenfunction decay; e^{2|p|}u^2 is not localized");
}

BandMatrix<double> assemble_T(const OscillatorSpec &spec, const Grid &grid)
{
  spec.validate();
  const std::size_t n = grid.size();
  NSA_REQUIRE(n >= 3 && grid.step > 0.0, "grid must have at least 3 nodes");
  const double ih2 = 1.0 / (grid.step * grid.step);
  BandMatrix<double> d2(n, 1, 1);
  for (std::size_t i = 0; i < n; i++)
  {
    d2(i, i) = 2.0 * ih2;
    if (i > 0)
    {
      d2(i, i - 1) = -ih2;
    }
    if (i + 1 < n)
    {
      d2(i, i + 1) = -ih2;
    }
  }
  BandMatrix<double> t = d2;
  for (int j = 1; j < spec.m(); j++)
  {
    t = BandProduct(t, d2);
  }
  for (std::size_t i = 0; i < n; i++)
  {
    t(i, i) += std::pow(std::abs(grid.nodes[i]), spec.beta);
  }
  return t;
}

std::vector<EigenPair> eigensolve_T(const OscillatorSpec &spec, const Grid &grid)
{
  const auto t = assemble_T(spec, grid);
  const std::size_t k_count = static_cast<std::size_t>(spec.num_modes);
  NSA_REQUIRE(k_count < grid.size(), "more modes requested than grid nodes");
  const auto [lo, hi] = gershgorin_bounds(t);
  std::vector<EigenPair> pairs(k_count);
  parallel_for(k_count, [&](std::size_t k)
  {
    EigenPair &p = pairs[k];
    p.k = static_cast<int>(k);
    p.lambda = bisect_eigenvalue(t, k, lo, hi);
    p.u = inverse_iteration(t, p.lambda, static_cast<unsigned>(k + 1));
    Finish(p, grid.step);
    // Oscillation counting is a Sturm property of second-order operators only; D^{2m}
    // eigenfunctions have oscillating tails.
    if (spec.m() == 1 && p.sign_changes != p.k)
    {
      throw NumericalFailure("eigensolve_T", "mode " + std::to_string(k) + " has " +
                                                 std::to_string(p.sign_changes) +
                                                 " sign changes; grid under-resolved");
    }
  });
  for (std::size_t k = 1; k < k_count; k++)
  {
    if (!(pairs[k].lambda > pairs[k - 1].lambda))
    {
      throw NumericalFailure("eigensolve_T", "eigenvalues not strictly increasing at k=" +
                                                 std::to_string(k));
    }
  }
  return pairs;
}

namespace
{

std::vector<EigenPair> SolveOnGrid(const OscillatorSpec &spec, const Grid &grid)
{
  auto coarse = eigensolve_T(spec, grid);
  if (!spec.richardson)
  {
    for (auto &p : coarse)
    {
      p.lambda_error = std::numeric_limits<double>::quiet_NaN();
    }
    return coarse;
  }
  const Grid fine_grid = grid.refined();
  NSA_REQUIRE(fine_grid.size() <= spec.max_nodes,
              "refined grid needs " + std::to_string(fine_grid.size()) +
                  " nodes, above the cap of " + std::to_string(spec.max_nodes));
  const auto fine = eigensolve_T(spec, fine_grid);
  std::vector<EigenPair> out(coarse.size());
  for (std::size_t k = 0; k < coarse.size(); k++)
  {
    EigenPair &p = out[k];
    p.k = coarse[k].k;
    p.lambda = (4.0 * fine[k].lambda - coarse[k].lambda) / 3.0;
    p.lambda_error = std::abs(fine[k].lambda - coarse[k].lambda) / 3.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < grid.size(); i++)
    {
      dot += fine[k].u[2 * i] * coarse[k].u[i];
    }
    const double s = dot < 0.0 ? -1.0 : 1.0;
    p.u.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); i++)
    {
      p.u[i] = (4.0 * s * fine[k].u[2 * i] - coarse[k].u[i]) / 3.0;
    }
    Finish(p, grid.step);
  }
  return out;
}

}  // namespace

TSolution solve_T(const OscillatorSpec &spec, const WeightSpec &w)
{
  spec.validate();
  const WkbResult law = wkb_law(spec.beta, spec.m());
  const double estimate = (spec.beta == 2.0 && spec.m() == 1)
                              ? 2.0 * spec.num_modes + 1.0
                              : law.lambda_of_k(spec.num_modes);
  TSolution sol;
  sol.spec = spec;
  sol.lambda_estimate = estimate;
  auto grid_for = [&](double lam)
  {
    // The decay width also covers p = 0: margin * turning point alone leaves the top modes
    // clipped at the 1e-5 level.
    const double min_x = decay_half_width(spec.beta, lam, w, spec.m());
    return build_grid(spec, lam, min_x);
  };
  const Grid grid = grid_for(estimate);

  std::string cache_path;
  if (const char *dir = std::getenv("NSA_CACHE_DIR"); dir != nullptr && *dir != '\0')
  {
    cache_path = (std::filesystem::path(dir) / cache_key(spec, grid)).string();
    if (read_cache(cache_path, spec, sol.grid, sol.pairs))
    {
      sol.from_cache = true;
      return sol;
    }
  }

  sol.grid = grid;
  sol.pairs = SolveOnGrid(spec, sol.grid);
  const double top = sol.pairs.back().lambda;
  if (top > 1.05 * estimate)
  {
    sol.grid = grid_for(1.05 * top);
    sol.pairs = SolveOnGrid(spec, sol.grid);
    sol.rebuilt = true;
  }
  if (!cache_path.empty())
  {
    write_cache(cache_path, spec, sol.grid, sol.pairs);
  }
  return sol;
}

BandMatrix<std::complex<double>> assemble_L(const OscillatorSpec &spec, const Grid &grid,
                                            const WeightSpec &w)
{
  using C = std::complex<double>;
  const auto t = assemble_T(spec, grid);
  const std::size_t n = grid.size();
  const int b = t.lower();
  BandMatrix<C> l(n, b, b);
  for (std::size_t i = 0; i < n; i++)
  {
    const std::size_t j0 = i >= static_cast<std::size_t>(b) ? i - b : 0;
    const std::size_t j1 = std::min(n - 1, i + b);
    for (std::size_t j = j0; j <= j1; j++)
    {
      l(i, j) = t(i, j);
    }
  }
  if (w.is_zero() && !w.phase())
  {
    return l;
  }
  if (w.family() == WeightFamily::HoShift)
  {
    NSA_REQUIRE(spec.beta == 2.0 && spec.deriv_order == 2 && !w.phase(),
                "ho_shift uses the harmonic-oscillator shift form (beta = 2, 2m = 2, no phase)");
    for (std::size_t i = 0; i < n; i++)
    {
      l(i, i) += C(0.0, 2.0 * w.a() * grid.nodes[i]);
    }
    return l;
  }
  NSA_REQUIRE(spec.deriv_order == 2, "conjugated operator L is only assembled for 2m = 2");
  if (w.relaxed_bound() || w.family() == WeightFamily::OddPower)
  {
    NSA_REQUIRE(w.beta() == spec.beta, "weight family was built for a different beta");
  }
  const double h = grid.step;
  for (std::size_t i = 0; i < n; i++)
  {
    const WeightDerivs d = w.eval(grid.nodes[i]);
    WeightDerivs r{};
    if (w.phase())
    {
      r = w.phase()->eval(grid.nodes[i]);
    }
    const C dq(d.dp, r.dp), ddq(d.ddp, r.ddp);
    l(i, i) += ddq - dq * dq;
    if (i + 1 < n)
    {
      l(i, i + 1) += dq / h;
    }
    if (i > 0)
    {
      l(i, i - 1) -= dq / h;
    }
  }
  return l;
}

ComplexSpectrum eigensolve_L(const BandMatrix<std::complex<double>> &matrix, std::size_t count,
                             std::size_t max_dense)
{
  using C = std::complex<double>;
  const std::size_t n = matrix.size();
  NSA_REQUIRE(n <= max_dense, "grid of " + std::to_string(n) + " nodes is too large for the " +
                                  "dense solve (cap " + std::to_string(max_dense) +
                                  "); reduce K or resolution");
  NSA_REQUIRE(count >= 1 && count <= n, "eigenvalue count out of range");
  bool real = true;
  for (std::size_t i = 0; i < n && real; i++)
  {
    for (std::size_t j = 0; j < n; j++)
    {
      if (matrix.get(i, j).imag() != 0.0)
      {
        real = false;
        break;
      }
    }
  }
  Eigen::VectorXcd values;
  if (real)
  {
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; i++)
    {
      for (std::size_t j = 0; j < n; j++)
      {
        a(i, j) = matrix.get(i, j).real();
      }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    if (solver.info() != Eigen::Success)
    {
      throw NumericalFailure("eigensolve_L", "real nonsymmetric eigensolver did not converge");
    }
    values = solver.eigenvalues();
  }
  else
  {
    Eigen::MatrixXcd a(n, n);
    for (std::size_t i = 0; i < n; i++)
    {
      for (std::size_t j = 0; j < n; j++)
      {
        a(i, j) = matrix.get(i, j);
      }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
    if (solver.info() != Eigen::Success)
    {
      throw NumericalFailure("eigensolve_L", "complex eigensolver did not converge");
    }
    values = solver.eigenvalues();
  }
  std::vector<C> all(values.data(), values.data() + values.size());
  std::sort(all.begin(), all.end(), [](const C &x, const C &y)
  {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay)
    {
      return ax < ay;
    }
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  ComplexSpectrum out;
  out.eigenvalues.assign(all.begin(), all.begin() + static_cast<long>(count));
  out.residuals.resize(count);
  parallel_for(count, [&](std::size_t j)
  {
    double res = 0.0;
    inverse_iteration(matrix, out.eigenvalues[j], static_cast<unsigned>(j + 1), res);
    out.residuals[j] = res;
  });
  return out;
}

std::complex<double> refine_eigenvalue(const BandMatrix<std::complex<double>> &matrix,
                                       std::complex<double> guess, double &residual,
                                       unsigned seed)
{
  using C = std::complex<double>;
  const std::size_t n = matrix.size();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<C> v(n), w(n);
  for (auto &x : v)
  {
    x = dist(rng);
  }
  C sigma = guess;
  for (int it = 0; it < 30; it++)
  {
    // w = (A - sigma)^{-1} v; for an eigenvector v, w = v/(lambda - sigma).
    const BandLU<C> lu(matrix, sigma);
    w = v;
    lu.solve(w);
    C wv(0.0);
    double ww = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      wv += std::conj(w[i]) * v[i];
      ww += std::norm(w[i]);
    }
    const C next = sigma + wv / ww;
    const double inv = 1.0 / std::sqrt(ww);
    for (std::size_t i = 0; i < n; i++)
    {
      v[i] = w[i] * inv;
    }
    const bool done = std::abs(next - sigma) <= 1e-14 * std::abs(next);
    sigma = next;
    if (done && it >= 2)
    {
      break;
    }
  }
  std::vector<C> av(n);
  matrix.multiply(v, av);
  double r = 0.0;
  for (std::size_t i = 0; i < n; i++)
  {
    r += std::norm(av[i] - sigma * v[i]);
  }
  residual = std::sqrt(r);
  return sigma;
}

int count_sign_changes(std::span<const double> u, double rel_floor)
{
  double m = 0.0;
  for (double x : u)
  {
    m = std::max(m, std::abs(x));
  }
  const double floor = rel_floor * m;
  int changes = 0;
  int last = 0;
  for (double x : u)
  {
    if (std::abs(x) <= floor)
    {
      continue;
    }
    const int s = x > 0.0 ? 1 : -1;
    if (last != 0 && s != last)
    {
      changes++;
    }
    last = s;
  }
  return changes;
}

}  // namespace nsa
