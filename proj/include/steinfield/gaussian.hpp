#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steinfield/field_ops.hpp"
#include "steinfield/rng.hpp"
#include "steinfield/spectral.hpp"
#include "steinfield/sphere.hpp"

namespace steinfield {

// Covariance matrix of a scalar kernel restricted to grid points. Fields
// with d coordinates use it diagonally (coordinates i.i.d.).
struct KernelMatrix {
  std::shared_ptr<const SphereGrid> grid;
  Eigen::MatrixXd entries;
  double jitter_used = 0.0;
};

// Kernel matrix of the smoothing covariance on a grid.
KernelMatrix covariance_kernel_matrix(std::shared_ptr<const SphereGrid> grid,
                                      const SpectralParams& params);

// Kernel matrix of an arbitrary symmetric scalar kernel.
KernelMatrix kernel_matrix_from(std::shared_ptr<const SphereGrid> grid,
                                const std::function<double(const SpherePoint&,
                                                           const SpherePoint&)>& k);

// Lower-triangular Cholesky factor with the jitter escalation
// 0 -> 1e-12 -> 1e-10 -> 1e-8 on the diagonal; a final failure reports
// the minimum eigenvalue. jitter_used records what was added.
struct CholeskyFactor {
  Eigen::MatrixXd L;
  double jitter_used = 0.0;
};
CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& K);

// count i.i.d. centered Gaussian fields with d i.i.d. coordinates, each
// with covariance K across grid points. Draw order is fixed (per draw,
// per coordinate column, per point), so results are reproducible from
// the seed alone. With antithetic = true the draws come in (+Z, -Z)
// pairs (count must be even) — a variance-reduction option used by the
// convergence experiment and off by default.
std::vector<FieldSample> cholesky_sample(const KernelMatrix& K, int d, Rng& rng,
                                         int count, bool antithetic = false);

// Truncated Karhunen-Loeve sampler of the smoothing field on S^1: the
// degree-k cos/sin coefficients are independent N(0, lambda_k^{-n_iota}),
// synthesized on the grid. Rejects n != 1.
std::vector<FieldSample> sample_smoothing_field_kl(
    const SpectralParams& params, std::shared_ptr<const SphereGrid> grid, int d,
    Rng& rng, int count);

// Variance of the Paley-Wiener integral of h: <h, h>_H.
double paley_wiener_variance(const BandLimitedField& h, double iota);

struct MonteCarloValue {
  double value = 0.0;
  double std_err = 0.0;
};

// Smoothed test functional: E[zeta(f_eps + delta * S)] by Monte Carlo over
// draws of the smoothing field S (delta = 0 collapses to the exact value
// zeta(f_eps) with zero std-err). S is drawn by KL on S^1 and through the
// Cholesky path elsewhere.
MonteCarloValue smoothed_test_eval(
    const std::function<double(const FieldSample&)>& zeta, const FieldSample& f,
    double epsilon, double delta, const SpectralParams& params, Rng& rng,
    int mc_count);

// Sample-batch serialization: columns `draw_index, point_index,
// coord_index, value`.
void write_samples_csv(const std::vector<FieldSample>& draws,
                       const std::string& path);

}  // namespace steinfield
