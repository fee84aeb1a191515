// Copyright nsa-spectra contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>
#include "nsa/band_matrix.hpp"
#include "nsa/specfun.hpp"
#include "nsa/weights.hpp"

namespace nsa
{

//
// Finite-difference discretization of T = D^{2m} + |x|^beta on a truncated uniform grid
// (Dirichlet outside), of L = T + B(p), and the corresponding eigensolves.
//

struct OscillatorSpec
{
  double beta = 2.0;
  int deriv_order = 2;  // 2m
  int num_modes = 10;   // K
  double margin = 1.5;
  double points_per_wavelength = 60.0;
  std::size_t max_nodes = 400000;
  // Combine the h and h/2 solves by Richardson extrapolation.
  bool richardson = true;

  int m() const { return deriv_order / 2; }
  void validate() const;
};

struct Grid
{
  double half_width = 0.0;  // X
  double step = 0.0;        // h
  std::vector<double> nodes;

  std::size_t size() const { return nodes.size(); }
  QuadratureRule trapezoid() const { return QuadratureRule::trapezoid(nodes); }
  // Same X with step h/2; every other node coincides with this grid.
  Grid refined() const;
};

struct EigenPair
{
  int k = 0;
  double lambda = 0.0;
  std::vector<double> u;        // trapezoid-normalized, sign fixed
  double lambda_error = 0.0;    // estimated discretization error of lambda
  int sign_changes = 0;
  double parity_defect = 0.0;   // max_i ||u(x_i)| - |u(-x_i)||
};

struct ComplexSpectrum
{
  std::vector<std::complex<double>> eigenvalues;  // sorted by modulus
  std::vector<double> residuals;                  // ||(L - lambda) v|| / ||v||
};

// X = margin lambda^{1/beta}; h <= 2 pi/(ppw lambda^{1/(2m)}); odd node count.
// min_half_width widens X (used for weights that need a longer decay range).
Grid build_grid(const OscillatorSpec &spec, double lambda_max_estimate,
                double min_half_width = 0.0);

// Half width at which e^{2|p|} u^2 has fallen below 1e-16 of its peak for every mode
// with eigenvalue <= lambda, using the WKB decay exp(-2 int sqrt(x^beta - lambda)).
// Throws InvalidArgument when the weight outgrows the eigenfunction decay.
double decay_half_width(double beta, double lambda, const WeightSpec &w, int m = 1);

// Symmetric band matrix of D^{2m} + |x|^beta (bandwidth m).
BandMatrix<double> assemble_T(const OscillatorSpec &spec, const Grid &grid);

// Lowest K eigenpairs on one grid. Throws NumericalFailure if mode k does not have k sign
// changes (under-resolution).
std::vector<EigenPair> eigensolve_T(const OscillatorSpec &spec, const Grid &grid);

struct TSolution
{
  OscillatorSpec spec;
  Grid grid;
  std::vector<EigenPair> pairs;
  double lambda_estimate = 0.0;
  bool rebuilt = false;
  bool from_cache = false;
};

// Full pipeline: WKB estimate -> grid (widened to the decay width of e^{|p|}u) -> h and h/2
// solves -> Richardson.
// The grid is rebuilt once if the computed top eigenvalue exceeds the estimate by > 5%.
// Uses the binary cache when NSA_CACHE_DIR is set.
TSolution solve_T(const OscillatorSpec &spec, const WeightSpec &w = WeightSpec::zero());

// L = T + diag(q'' - q'^2) + 2 diag(q') d/dx with q = p + i r (central differences), or the
// harmonic-oscillator shift form T + 2iax for ho_shift. Tridiagonal, complex.
BandMatrix<std::complex<double>> assemble_L(const OscillatorSpec &spec, const Grid &grid,
                                            const WeightSpec &w);

// Dense nonsymmetric eigensolve; returns the count eigenvalues of smallest modulus with
// residuals from banded inverse iteration. Refuses matrices above max_dense nodes.
ComplexSpectrum eigensolve_L(const BandMatrix<std::complex<double>> &matrix, std::size_t count,
                             std::size_t max_dense = 2500);

// Shift-and-invert iteration with the shift updated to the quotient w^H v / w^H w each
// step; converges to the eigenvalue of the band matrix nearest the guess. Used to follow a
// dense-solve eigenvalue onto grids too large for the dense solver.
std::complex<double> refine_eigenvalue(const BandMatrix<std::complex<double>> &matrix,
                                       std::complex<double> guess, double &residual,
                                       unsigned seed = 1);

struct FourierResult
{
  std::vector<double> xi;                          // dual nodes, spacing 2 pi/(N h)
  std::vector<std::complex<double>> values;
  bool wrapped = false;                            // input not decayed at the grid ends
};

// u~(xi_j) = h/sqrt(2 pi) sum_n e^{-i x_n xi_j} u_n on the centered dual grid; unitary from
// (grid, weight h) to (dual grid, weight 2 pi/(N h)).
FourierResult fourier_on_grid(std::span<const std::complex<double>> u, const Grid &grid);

// Number of sign changes, ignoring entries below rel_floor * max|u|.
int count_sign_changes(std::span<const double> u, double rel_floor = 1e-10);

// NSAS cache, little-endian: "NSAS", u32 version, f64 beta, u32 K, u32 N, N f64 nodes,
// K f64 eigenvalues, K x N f64 eigenvectors (row-major), then K f64 eigenvalue error
// estimates.
void write_cache(const std::string &path, const OscillatorSpec &spec, const Grid &grid,
                 const std::vector<EigenPair> &pairs);
// Returns false if the file is absent, malformed or does not match (beta, K). The grid is
// rebuilt from the stored nodes.
bool read_cache(const std::string &path, const OscillatorSpec &spec, Grid &grid,
                std::vector<EigenPair> &pairs);
// Cache file name for a (spec, grid) pair.
std::string cache_key(const OscillatorSpec &spec, const Grid &grid);

}  // namespace nsa
