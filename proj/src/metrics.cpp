#include "steinfield/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "steinfield/errors.hpp"

namespace steinfield {

SampleBatch SampleBatch::from_draws(const std::vector<FieldSample>& draws) {
  if (draws.empty()) throw ConfigError("SampleBatch: no draws");
  draws.front().validate();
  const Eigen::Index m = draws.front().values.rows();
  const Eigen::Index d = draws.front().values.cols();
  SampleBatch b;
  b.grid = draws.front().grid;
  b.d = static_cast<int>(d);
  b.flat.resize(static_cast<Eigen::Index>(draws.size()), m * d);
  for (std::size_t r = 0; r < draws.size(); ++r) {
    if (draws[r].values.rows() != m || draws[r].values.cols() != d) {
      throw ConfigError("SampleBatch: draws have mixed shapes");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index c = 0; c < d; ++c) {
        b.flat(static_cast<Eigen::Index>(r), i * d + c) = draws[r].values(i, c);
      }
    }
  }
  return b;
}

double w1_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("w1_1d: empty sample set");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return acc / double(a.size());
  }
  // Unequal counts: integrate |F_a^{-1}(u) - F_b^{-1}(u)| du over the merged
  // quantile breakpoints i/|a| and j/|b|.
  const double na = double(a.size());
  const double nb = double(b.size());
  std::size_t ia = 0, ib = 0;
  double u = 0.0, acc = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double next_a = double(ia + 1) / na;
    const double next_b = double(ib + 1) / nb;
    const double u_next = std::min(next_a, next_b);
    acc += (u_next - u) * std::fabs(a[ia] - b[ib]);
    if (next_a <= u_next + 1e-15) ++ia;
    if (next_b <= u_next + 1e-15) ++ib;
    u = u_next;
  }
  return acc;
}

namespace {
void require_same_shape(const SampleBatch& A, const SampleBatch& B,
                        const char* where) {
  if (A.marginal_count() != B.marginal_count() || A.d != B.d) {
    throw ConfigError(std::string(where) + ": batch shapes differ");
  }
}

std::vector<double> column_of(const SampleBatch& X, Eigen::Index j) {
  std::vector<double> v(X.flat.rows());
  for (Eigen::Index r = 0; r < X.flat.rows(); ++r) v[r] = X.flat(r, j);
  return v;
}

// Deterministic even-stride row thinning, keeping at most max_rows rows.
Eigen::MatrixXd thin_rows(const Eigen::MatrixXd& X, int max_rows) {
  const Eigen::Index n = X.rows();
  if (n <= max_rows) return X;
  Eigen::MatrixXd out(max_rows, X.cols());
  for (int i = 0; i < max_rows; ++i) {
    out.row(i) = X.row((static_cast<Eigen::Index>(i) * n) / max_rows);
  }
  return out;
}

double energy_statistic(const Eigen::MatrixXd& D, Eigen::Index na) {
  const Eigen::Index n = D.rows();
  const Eigen::Index nb = n - na;
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = na; j < n; ++j) xy += D(i, j);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = i + 1; j < na; ++j) xx += D(i, j);
  for (Eigen::Index i = na; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) yy += D(i, j);
  return 2.0 * xy / (double(na) * nb) - 2.0 * xx / (double(na) * (na - 1)) -
         2.0 * yy / (double(nb) * (nb - 1));
}
}  // namespace

double max_marginal_w1(const SampleBatch& A, const SampleBatch& B) {
  require_same_shape(A, B, "max_marginal_w1");
  double best = 0.0;
  for (Eigen::Index j = 0; j < A.marginal_count(); ++j) {
    best = std::max(best, w1_1d(column_of(A, j), column_of(B, j)));
  }
  return best;
}

double sliced_w1(const SampleBatch& A, const SampleBatch& B, Rng& rng,
                 int direction_count) {
  require_same_shape(A, B, "sliced_w1");
  if (direction_count < 1) throw ConfigError("sliced_w1: direction_count >= 1");
  const Eigen::Index dims = A.marginal_count();
  double acc = 0.0;
  for (int t = 0; t < direction_count; ++t) {
    Eigen::VectorXd dir(dims);
    for (Eigen::Index i = 0; i < dims; ++i) dir[i] = rng.normal();
    dir /= dir.norm();
    const Eigen::VectorXd pa = A.flat * dir;
    const Eigen::VectorXd pb = B.flat * dir;
    acc += w1_1d(std::vector<double>(pa.data(), pa.data() + pa.size()),
                 std::vector<double>(pb.data(), pb.data() + pb.size()));
  }
  return acc / direction_count;
}

double energy_distance(const SampleBatch& A, const SampleBatch& B, int max_rows) {
  require_same_shape(A, B, "energy_distance");
  if (A.draw_count() < 2 || B.draw_count() < 2) {
    throw ConfigError("energy_distance: need at least 2 draws per batch");
  }
  const Eigen::MatrixXd X = thin_rows(A.flat, max_rows);
  const Eigen::MatrixXd Y = thin_rows(B.flat, max_rows);
  const Eigen::Index na = X.rows(), n = na + Y.rows();
  Eigen::MatrixXd P(n, X.cols());
  P.topRows(na) = X;
  P.bottomRows(Y.rows()) = Y;
  Eigen::MatrixXd D(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    D(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (P.row(i) - P.row(j)).norm();
      D(i, j) = dist;
      D(j, i) = dist;
    }
  }
  return energy_statistic(D, na);
}

double energy_permutation_pvalue(const SampleBatch& A, const SampleBatch& B,
                                 Rng& rng, int permutations, int max_rows) {
  require_same_shape(A, B, "energy_permutation_pvalue");
  if (A.draw_count() < 2 || B.draw_count() < 2) {
    throw ConfigError("energy_permutation_pvalue: need at least 2 draws per batch");
  }
  if (permutations < 1) throw ConfigError("energy_permutation_pvalue: permutations >= 1");
  const Eigen::MatrixXd X = thin_rows(A.flat, max_rows);
  const Eigen::MatrixXd Y = thin_rows(B.flat, max_rows);
  const Eigen::Index na = X.rows(), n = na + Y.rows();
  Eigen::MatrixXd P(n, X.cols());
  P.topRows(na) = X;
  P.bottomRows(Y.rows()) = Y;
  Eigen::MatrixXd D(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    D(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (P.row(i) - P.row(j)).norm();
      D(i, j) = dist;
      D(j, i) = dist;
    }
  }
  const double observed = energy_statistic(D, na);
  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  int geq = 0;
  Eigen::MatrixXd Dp(n, n);
  for (int t = 0; t < permutations; ++t) {
    // Fisher-Yates with the experiment RNG.
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const Eigen::Index j = static_cast<Eigen::Index>(rng.uniform() * double(i + 1));
      std::swap(perm[i], perm[std::min(j, i)]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) Dp(i, j) = D(perm[i], perm[j]);
    }
    if (energy_statistic(Dp, na) >= observed) ++geq;
  }
  return (geq + 1.0) / (permutations + 1.0);
}

}  // namespace steinfield
