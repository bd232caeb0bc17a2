#pragma once

#include <vector>

#include "steinfield/sphere.hpp"

namespace steinfield {

// Spectral data of the sphere Laplacian on S^n: the covariance kernel
// sum_{k>=1} Z_k(x,y) / lambda_k^{n_iota} (constant mode excluded — the
// zero eigenvalue cannot be inverted) and the heat kernel
// 1/area + sum_{k>=1} exp(-eps*lambda_k/2) Z_k(x,y) (constant mode
// included so the kernel conserves probability mass).
struct SpectralParams {
  int dim_n = 1;          // sphere dimension n >= 1
  double iota = 1.0;      // smoothing exponent iota > 0
  int truncation_K = 1;   // max retained degree
  bool include_constant_mode = true;  // heat kernel only

  double n_iota() const { return 0.5 * (dim_n + iota); }
  void validate() const;  // throws ConfigError on violation
};

// Laplacian eigenvalue lambda_k = k (k + n - 1).
long long eigenvalue(long long k, int n);

// Eigenspace dimension d_k = (2k+n-1)/k * binom(n+k-2, k-1); d_0 = 1.
long long eigenspace_dim(long long k, int n);

// Gegenbauer polynomial C_k^{lambda}(x) by the forward three-term
// recurrence from C_{-1} = 0, C_0 = 1.
double gegenbauer(int k, double lambda_param, double x);

// Degree-k zonal kernel Z_k(x, y) as a function of cos(angle) = <x, y>.
//   n = 1: cos(k * angle) / pi, evaluated Chebyshev-style (no arccos);
//   n >= 2: Gamma((n+1)/2) (2k+n-1) / (2 pi^{(n+1)/2} (n-1)) * C_k^{(n-1)/2}.
// Inputs with |cos_angle| <= 1 + 1e-12 are clamped; anything farther out
// is rejected.
double zonal(int k, int n, double cos_angle);

// Diagonal value Z_k(x, x) = Gamma((n+1)/2) / (2 pi^{(n+1)/2}) * d_k.
double zonal_diag(int k, int n);

// Covariance kernel value at one pair; identical across coordinates of a
// vector field (the diagonal delta_{ij} structure lives in the sampler).
double smoothing_covariance(const SpherePoint& x, const SpherePoint& y,
                            const SpectralParams& params);
double smoothing_covariance_cos(double cos_angle, const SpectralParams& params);

// Probability heat kernel at time eps > 0.
double heat_kernel(const SpherePoint& x, const SpherePoint& y, double epsilon,
                   const SpectralParams& params);
double heat_kernel_cos(double cos_angle, double epsilon,
                       const SpectralParams& params);

// Batched kernel evaluation over many cos(angle) inputs: one recurrence
// sweep instead of per-pair loops. These are what the kernel-matrix
// assembly uses.
std::vector<double> smoothing_covariance_batch(const std::vector<double>& cos_angles,
                                               const SpectralParams& params);
std::vector<double> heat_kernel_batch(const std::vector<double>& cos_angles,
                                      double epsilon, const SpectralParams& params);

// Smallest K whose analytic tail majorant
//   sum_{k>K} [Gamma((n+1)/2)/(2 pi^{(n+1)/2})] d_k w_k  <  tol
// drops below tol, with w_k = lambda_k^{-n_iota} (covariance weights) or
// w_k = exp(-eps*lambda_k/2) (heat weights). Throws NumericalError when
// the required K would exceed hard_cap.
int truncation_level_covariance(const SpectralParams& params, double tol = 1e-10,
                                long long hard_cap = 1000000);
int truncation_level_heat(const SpectralParams& params, double epsilon,
                          double tol = 1e-12, long long hard_cap = 1000000);

}  // namespace steinfield
