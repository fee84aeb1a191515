// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nsa
{

// Square band matrix with kl subdiagonals and ku superdiagonals, stored by rows.
template <typename T>
class BandMatrix
{
public:
  BandMatrix() = default;
  BandMatrix(std::size_t n, int kl, int ku);

  std::size_t size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const
  {
    const long d = static_cast<long>(j) - static_cast<long>(i);
    return d >= -kl_ && d <= ku_;
  }

  // Element access; (i, j) must lie in the band.
  T &operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  const T &operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }

  // Zero outside the band.
  T get(std::size_t i, std::size_t j) const { return in_band(i, j) ? data_[index(i, j)] : T(0); }

  void multiply(std::span<const T> x, std::span<T> y) const;

private:
  std::size_t index(std::size_t i, std::size_t j) const
  {
    return i * static_cast<std::size_t>(kl_ + ku_ + 1) + (j + kl_ - i);
  }

  std::size_t n_ = 0;
  int kl_ = 0, ku_ = 0;
  std::vector<T> data_;
};

// LU factorization of (A - shift I) with partial pivoting, in band form (the upper band of
// U widens to kl + ku). Zero pivots are replaced by a tiny multiple of the matrix scale,
// which is what inverse iteration at an exact eigenvalue needs.
template <typename T>
class BandLU
{
public:
  BandLU(const BandMatrix<T> &a, T shift);

  // Overwrites b with the solution.
  void solve(std::span<T> b) const;

  // Number of pivots that had to be perturbed.
  int perturbed_pivots() const { return perturbed_; }

private:
  std::size_t n_;
  int kl_, ku_;
  std::vector<T> u_;           // rows of U, width 2 kl + ku + 1
  std::vector<T> l_;           // multipliers, width kl
  std::vector<std::size_t> piv_;
  int perturbed_ = 0;
};

// Number of eigenvalues of the symmetric band matrix A strictly below sigma, from the
// inertia of an LDL^T factorization of A - sigma I. Uses only the lower band of A.
std::size_t count_below(const BandMatrix<double> &a, double sigma);

// Gershgorin interval containing the spectrum of a symmetric band matrix.
std::pair<double, double> gershgorin_bounds(const BandMatrix<double> &a);

// The k-th smallest eigenvalue (k from 0) by bisection on count_below.
double bisect_eigenvalue(const BandMatrix<double> &a, std::size_t k, double lo, double hi);

// Eigenvector for an eigenvalue lambda accurate to working precision, by inverse iteration
// from a deterministic start. Each step shrinks the other eigencomponents by about
// |lambda - sigma|/gap ~ 1e-15, so exponentially small tails need many steps to surface
// above the leftover noise: iteration stops once every entry above 1e-280 of the maximum
// is stable to 1e-10 relative, or after max_iterations. Unit Euclidean norm, largest
// entry positive.
std::vector<double> inverse_iteration(const BandMatrix<double> &a, double lambda, unsigned seed,
                                      int max_iterations = 60);

// Complex variant; returns the vector and the residual ||(A - lambda)v|| / ||v||.
std::vector<std::complex<double>> inverse_iteration(const BandMatrix<std::complex<double>> &a,
                                                    std::complex<double> lambda, unsigned seed,
                                                    double &residual, int iterations = 3);

}  // namespace nsa
