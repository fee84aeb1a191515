// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <complex>
#include <random>
#include "doctest.h"
#include "nsa/band_matrix.hpp"

using namespace nsa;

namespace
{

BandMatrix<double> RandomSymmetric(std::size_t n, int b, unsigned seed)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  BandMatrix<double> a(n, b, b);
  for (std::size_t i = 0; i < n; i++)
  {
    a(i, i) = 4.0 * dist(rng) + 0.01 * i;
    for (int d = 1; d <= b && i + d < n; d++)
    {
      a(i, i + d) = a(i + d, i) = dist(rng);
    }
  }
  return a;
}

template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> Dense(const BandMatrix<T> &a)
{
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> m(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); i++)
  {
    for (std::size_t j = 0; j < a.size(); j++)
    {
      m(i, j) = a.get(i, j);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("count_below and bisection match a dense symmetric solve")
{
  for (int b : {1, 2, 3})
  {
    const auto a = RandomSymmetric(120, b, 7 + b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Dense(a));
    const auto ev = es.eigenvalues();
    const auto [lo, hi] = gershgorin_bounds(a);
    CHECK(lo <= ev(0));
    CHECK(hi >= ev(119));
    for (std::size_t k = 0; k < 120; k += 7)
    {
      CHECK(count_below(a, ev(k) - 1e-9) == k);
      CHECK(count_below(a, ev(k) + 1e-9) == k + 1);
      const double lam = bisect_eigenvalue(a, k, lo, hi);
      CHECK(lam == doctest::Approx(ev(k)).epsilon(1e-12).scale(1.0));
      const auto v = inverse_iteration(a, lam, 11);
      std::vector<double> av(v.size());
      a.multiply(v, av);
      double r = 0.0;
      for (std::size_t i = 0; i < v.size(); i++)
      {
        r = std::max(r, std::abs(av[i] - lam * v[i]));
      }
      CHECK(r < 1e-12);
    }
  }
}

TEST_CASE("banded LU solve matches dense solve")
{
  using C = std::complex<double>;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto [kl, ku] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 3}})
  {
    BandMatrix<C> a(60, kl, ku);
    for (std::size_t i = 0; i < 60; i++)
    {
      for (std::size_t j = 0; j < 60; j++)
      {
        if (a.in_band(i, j))
        {
          a(i, j) = C(dist(rng), dist(rng));
        }
      }
    }
    std::vector<C> rhs(60);
    for (auto &x : rhs)
    {
      x = C(dist(rng), dist(rng));
    }
    const C shift(0.3, -0.2);
    BandLU<C> lu(a, shift);
    std::vector<C> sol(rhs);
    lu.solve(sol);
    Eigen::MatrixXcd m = Dense(a) - shift * Eigen::MatrixXcd::Identity(60, 60);
    Eigen::VectorXcd ref = m.partialPivLu().solve(Eigen::Map<Eigen::VectorXcd>(rhs.data(), 60));
    for (int i = 0; i < 60; i++)
    {
      CHECK(std::abs(sol[i] - ref(i)) < 1e-9 * (1.0 + std::abs(ref(i))));
    }
  }
}

TEST_CASE("complex inverse iteration reports a small residual at an eigenvalue")
{
  using C = std::complex<double>;
  BandMatrix<C> a(80, 1, 1);
  for (std::size_t i = 0; i < 80; i++)
  {
    a(i, i) = C(2.0 + 0.05 * i, 0.0);
    if (i + 1 < 80)
    {
      a(i, i + 1) = C(-1.0, 0.3);
      a(i + 1, i) = C(-1.0, -0.1);
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Dense(a), false);
  double residual = 1.0;
  inverse_iteration(a, es.eigenvalues()(5), 1, residual);
  CHECK(residual < 1e-10);
}
