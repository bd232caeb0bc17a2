#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "steinfield/field_ops.hpp"
#include "steinfield/rng.hpp"

namespace steinfield {

// A batch of field draws sharing one grid and coordinate count, flattened
// to an N x (m*d) matrix; column (point * d + coord) holds one scalar
// marginal across draws.
struct SampleBatch {
  std::shared_ptr<const SphereGrid> grid;
  int d = 1;
  Eigen::MatrixXd flat;  // draws x (points * d)

  static SampleBatch from_draws(const std::vector<FieldSample>& draws);
  Eigen::Index draw_count() const { return flat.rows(); }
  Eigen::Index marginal_count() const { return flat.cols(); }
};

// Exact 1-D Wasserstein distance between empirical measures: mean absolute
// difference of sorted samples for equal counts; piecewise-constant
// quantile coupling on the merged order statistics otherwise.
double w1_1d(std::vector<double> a, std::vector<double> b);

// Max over scalar marginals (grid point x coordinate) of w1_1d; a lower
// bound on the sup-norm-cost W1 because each evaluation functional is
// 1-Lipschitz.
double max_marginal_w1(const SampleBatch& A, const SampleBatch& B);

// Average w1_1d between projections of the flattened draws onto random
// unit directions.
double sliced_w1(const SampleBatch& A, const SampleBatch& B, Rng& rng,
                 int direction_count);

// Energy distance 2 E||X-Y|| - E||X-X'|| - E||Y-Y'|| (U-statistic) on the
// flattened draws. Batches larger than max_rows are thinned by a
// deterministic even stride so the cost stays quadratic in max_rows.
double energy_distance(const SampleBatch& A, const SampleBatch& B,
                       int max_rows = 1024);

// Permutation p-value for the energy statistic (fraction of label
// permutations with a statistic >= the observed one).
double energy_permutation_pvalue(const SampleBatch& A, const SampleBatch& B,
                                 Rng& rng, int permutations = 200,
                                 int max_rows = 512);

}  // namespace steinfield
