// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#include "nsa/band_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include "nsa/error.hpp"

namespace nsa
{

template <typename T>
BandMatrix<T>::BandMatrix(std::size_t n, int kl, int ku)
  : n_(n), kl_(kl), ku_(ku), data_(n * static_cast<std::size_t>(kl + ku + 1), T(0))
{
  NSA_REQUIRE(kl >= 0 && ku >= 0, "band widths must be nonnegative");
}

template <typename T>
void BandMatrix<T>::multiply(std::span<const T> x, std::span<T> y) const
{
  NSA_REQUIRE(x.size() == n_ && y.size() == n_, "band multiply size mismatch");
  for (std::size_t i = 0; i < n_; i++)
  {
    const std::size_t j0 = i >= static_cast<std::size_t>(kl_) ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    T s(0);
    for (std::size_t j = j0; j <= j1; j++)
    {
      s += data_[index(i, j)] * x[j];
    }
    y[i] = s;
  }
}

template <typename T>
BandLU<T>::BandLU(const BandMatrix<T> &a, T shift)
  : n_(a.size()), kl_(a.lower()), ku_(a.upper()), piv_(a.size())
{
  const std::size_t n = n_;
  const int w = 2 * kl_ + ku_ + 1;  // row width of the working U, offset kl
  u_.assign(n * w, T(0));
  l_.assign(n * std::max(kl_, 1), T(0));
  auto U = [&](std::size_t i, std::size_t j) -> T & { return u_[i * w + (j + kl_ - i)]; };
  double scale = 0.0;
  for (std::size_t i = 0; i < n; i++)
  {
    const std::size_t j0 = i >= static_cast<std::size_t>(kl_) ? i - kl_ : 0;
    const std::size_t j1 = std::min(n - 1, i + ku_);
    for (std::size_t j = j0; j <= j1; j++)
    {
      U(i, j) = a(i, j) - (i == j ? shift : T(0));
      scale = std::max(scale, std::abs(U(i, j)));
    }
  }
  const double tiny = std::max(scale, std::numeric_limits<double>::min()) *
                      std::numeric_limits<double>::epsilon();
  for (std::size_t k = 0; k < n; k++)
  {
    const std::size_t r1 = std::min(n - 1, k + kl_);
    std::size_t p = k;
    for (std::size_t r = k + 1; r <= r1; r++)
    {
      if (std::abs(U(r, k)) > std::abs(U(p, k)))
      {
        p = r;
      }
    }
    piv_[k] = p;
    const std::size_t c1 = std::min(n - 1, k + kl_ + ku_);
    if (p != k)
    {
      for (std::size_t j = k; j <= c1; j++)
      {
        std::swap(U(k, j), U(p, j));
      }
    }
    if (std::abs(U(k, k)) < tiny)
    {
      U(k, k) = T(tiny);
      perturbed_++;
    }
    for (std::size_t r = k + 1; r <= r1; r++)
    {
      const T m = U(r, k) / U(k, k);
      l_[r * std::max(kl_, 1) + (r - k - 1)] = m;
      U(r, k) = T(0);
      if (m != T(0))
      {
        for (std::size_t j = k + 1; j <= c1; j++)
        {
          U(r, j) -= m * U(k, j);
        }
      }
    }
  }
}

template <typename T>
void BandLU<T>::solve(std::span<T> b) const
{
  NSA_REQUIRE(b.size() == n_, "band solve size mismatch");
  const int w = 2 * kl_ + ku_ + 1;
  const int lw = std::max(kl_, 1);
  for (std::size_t k = 0; k < n_; k++)
  {
    std::swap(b[k], b[piv_[k]]);
    const std::size_t r1 = std::min(n_ - 1, k + kl_);
    for (std::size_t r = k + 1; r <= r1; r++)
    {
      b[r] -= l_[r * lw + (r - k - 1)] * b[k];
    }
  }
  for (std::size_t kk = n_; kk-- > 0;)
  {
    const std::size_t c1 = std::min(n_ - 1, kk + kl_ + ku_);
    T s = b[kk];
    for (std::size_t j = kk + 1; j <= c1; j++)
    {
      s -= u_[kk * w + (j + kl_ - kk)] * b[j];
    }
    b[kk] = s / u_[kk * w + kl_];
  }
}

template class BandMatrix<double>;
template class BandMatrix<std::complex<double>>;
template class BandLU<double>;
template class BandLU<std::complex<double>>;

std::size_t count_below(const BandMatrix<double> &a, double sigma)
{
  const std::size_t n = a.size();
  const int b = a.lower();
  double scale = std::abs(sigma);
  for (std::size_t i = 0; i < n; i++)
  {
    scale = std::max(scale, std::abs(a(i, i)));
  }
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, scale * scale);
  std::vector<double> d(n);
  std::size_t negatives = 0;
  if (b == 1)
  {
    // Sturm sequence of the tridiagonal case.
    double prev = 1.0;
    for (std::size_t i = 0; i < n; i++)
    {
      const double e = i > 0 ? a(i, i - 1) : 0.0;
      double di = a(i, i) - sigma - (i > 0 ? e * e / prev : 0.0);
      if (std::abs(di) < pivmin)
      {
        di = -pivmin;
      }
      negatives += di < 0.0;
      prev = di;
    }
    return negatives;
  }
  // Banded LDL^T, row by row; L(i, j) stored at lmat[i * b + (j + b - i)] for j in [i-b, i).
  std::vector<double> lmat(n * std::max(b, 1), 0.0);
  auto L = [&](std::size_t i, std::size_t j) -> double & { return lmat[i * b + (j + b - i)]; };
  for (std::size_t i = 0; i < n; i++)
  {
    const std::size_t j0 = i >= static_cast<std::size_t>(b) ? i - b : 0;
    for (std::size_t j = j0; j < i; j++)
    {
      double s = a(i, j);
      const std::size_t k0 = std::max(j0, j >= static_cast<std::size_t>(b) ? j - b : 0);
      for (std::size_t k = k0; k < j; k++)
      {
        s -= L(i, k) * d[k] * L(j, k);
      }
      L(i, j) = s / d[j];
    }
    double di = a(i, i) - sigma;
    for (std::size_t k = j0; k < i; k++)
    {
      di -= L(i, k) * L(i, k) * d[k];
    }
    if (std::abs(di) < pivmin)
    {
      di = -pivmin;
    }
    d[i] = di;
    negatives += di < 0.0;
  }
  return negatives;
}

std::pair<double, double> gershgorin_bounds(const BandMatrix<double> &a)
{
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; i++)
  {
    double r = 0.0;
    const std::size_t j0 = i >= static_cast<std::size_t>(a.lower()) ? i - a.lower() : 0;
    const std::size_t j1 = std::min(n - 1, i + a.upper());
    for (std::size_t j = j0; j <= j1; j++)
    {
      if (j != i)
      {
        r += std::abs(a(i, j));
      }
    }
    lo = std::min(lo, a(i, i) - r);
    hi = std::max(hi, a(i, i) + r);
  }
  return {lo, hi};
}

double bisect_eigenvalue(const BandMatrix<double> &a, std::size_t k, double lo, double hi)
{
  NSA_REQUIRE(k < a.size(), "eigenvalue index beyond matrix size");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 300; it++)
  {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) || mid <= lo || mid >= hi)
    {
      break;
    }
    (count_below(a, mid) > k ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace
{

template <typename T>
std::vector<T> RandomStart(std::size_t n, unsigned seed)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<T> v(n);
  for (auto &x : v)
  {
    x = T(dist(rng));
  }
  return v;
}

template <typename T>
void Normalize(std::vector<T> &v)
{
  // Two-pass norm so that huge intermediate vectors cannot overflow the squares.
  double m = 0.0;
  for (const auto &x : v)
  {
    m = std::max(m, std::abs(x));
  }
  if (m == 0.0 || !std::isfinite(m))
  {
    throw NumericalFailure("inverse_iteration", "iterate lost all information");
  }
  double s = 0.0;
  for (auto &x : v)
  {
    x /= m;
    s += std::norm(x);
  }
  const double inv = 1.0 / std::sqrt(s);
  for (auto &x : v)
  {
    x *= inv;
  }
}

}  // namespace

std::vector<double> inverse_iteration(const BandMatrix<double> &a, double lambda, unsigned seed,
                                      int max_iterations)
{
  const BandLU<double> lu(a, lambda);
  auto v = RandomStart<double>(a.size(), seed);
  std::vector<double> prev;
  for (int it = 0; it < max_iterations; it++)
  {
    lu.solve(v);
    Normalize(v);
    const auto big = std::max_element(v.begin(), v.end(),
                                      [](double x, double y) { return std::abs(x) < std::abs(y); });
    if (*big < 0.0)
    {
      for (auto &x : v)
      {
        x = -x;
      }
    }
    if (it >= 2)
    {
      const double floor = 1e-280 * std::abs(*big);
      bool stable = true;
      for (std::size_t i = 0; i < v.size() && stable; i++)
      {
        if (std::abs(prev[i]) > floor && std::abs(v[i] - prev[i]) > 1e-10 * std::abs(prev[i]))
        {
          stable = false;
        }
      }
      if (stable)
      {
        break;
      }
    }
    prev = v;
  }
  return v;
}

std::vector<std::complex<double>> inverse_iteration(const BandMatrix<std::complex<double>> &a,
                                                    std::complex<double> lambda, unsigned seed,
                                                    double &residual, int iterations)
{
  using C = std::complex<double>;
  const BandLU<C> lu(a, lambda);
  auto v = RandomStart<C>(a.size(), seed);
  for (int it = 0; it < iterations; it++)
  {
    lu.solve(v);
    Normalize(v);
  }
  std::vector<C> av(a.size());
  a.multiply(v, av);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); i++)
  {
    s += std::norm(av[i] - lambda * v[i]);
  }
  residual = std::sqrt(s);
  return v;
}

}  // namespace nsa
