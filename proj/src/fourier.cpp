// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include "nsa/error.hpp"
#include "nsa/schrodinger.hpp"

namespace nsa
{

FourierResult fourier_on_grid(std::span<const std::complex<double>> u, const Grid &grid)
{
  using C = std::complex<double>;
  const std::size_t n = grid.size();
  NSA_REQUIRE(u.size() == n, "Fourier input does not match the grid");
  NSA_REQUIRE(n % 2 == 1, "Fourier transform needs an odd, centered grid");
  const long nh = static_cast<long>(n / 2);
  const double pi = std::numbers::pi;
  // x_n xi_j = 2 pi n' j' / N exactly, so the phases come from one table of N-th roots of
  // unity indexed by n' j' mod N.
  std::vector<C> roots(n);
  for (std::size_t r = 0; r < n; r++)
  {
    const double t = 2.0 * pi * static_cast<double>(r) / static_cast<double>(n);
    roots[r] = C(std::cos(t), -std::sin(t));
  }
  FourierResult out;
  out.xi.resize(n);
  out.values.resize(n);
  const double dxi = 2.0 * pi / (static_cast<double>(n) * grid.step);
  const double scale = grid.step / std::sqrt(2.0 * pi);
  const long ln = static_cast<long>(n);
  for (long j = -nh; j <= nh; j++)
  {
    C s(0.0);
    for (long m = -nh; m <= nh; m++)
    {
      long r = (m * j) % ln;
      if (r < 0)
      {
        r += ln;
      }
      s += roots[r] * u[m + nh];
    }
    out.xi[j + nh] = static_cast<double>(j) * dxi;
    out.values[j + nh] = scale * s;
  }
  double peak = 0.0;
  for (const C &x : u)
  {
    peak = std::max(peak, std::abs(x));
  }
  out.wrapped = std::max(std::abs(u.front()), std::abs(u.back())) > 1e-12 * peak;
  return out;
}

}  // namespace nsa
