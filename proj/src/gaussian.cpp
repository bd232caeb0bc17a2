#include "steinfield/gaussian.hpp"

#include <cmath>
#include <string>

#include "steinfield/csv.hpp"
#include "steinfield/errors.hpp"

namespace steinfield {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

KernelMatrix covariance_kernel_matrix(std::shared_ptr<const SphereGrid> grid,
                                      const SpectralParams& params) {
  if (!grid) throw ConfigError("covariance_kernel_matrix: missing grid");
  const std::size_t m = grid->size();
  std::vector<double> cos_angles;
  cos_angles.reserve(m * (m + 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      cos_angles.push_back(grid->points[i].coords.dot(grid->points[j].coords));
    }
  }
  const std::vector<double> vals = smoothing_covariance_batch(cos_angles, params);
  KernelMatrix K;
  K.grid = std::move(grid);
  K.entries.resize(m, m);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      K.entries(i, j) = vals[idx];
      K.entries(j, i) = vals[idx];
      ++idx;
    }
  }
  return K;
}

KernelMatrix kernel_matrix_from(std::shared_ptr<const SphereGrid> grid,
                                const std::function<double(const SpherePoint&,
                                                           const SpherePoint&)>& k) {
  if (!grid) throw ConfigError("kernel_matrix_from: missing grid");
  const std::size_t m = grid->size();
  KernelMatrix K;
  K.grid = std::move(grid);
  K.entries.resize(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double v = k(K.grid->points[i], K.grid->points[j]);
      K.entries(i, j) = v;
      K.entries(j, i) = v;
    }
  }
  return K;
}

CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols()) throw ConfigError("cholesky: matrix not square");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff())) {
    throw ConfigError("cholesky: matrix not symmetric");
  }
  const double jitters[] = {0.0, 1e-12, 1e-10, 1e-8};
  for (double j : jitters) {
    Eigen::MatrixXd A = K;
    if (j > 0.0) A.diagonal().array() += j;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      CholeskyFactor f;
      f.L = llt.matrixL();
      f.jitter_used = j;
      return f;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  const double min_eig = es.info() == Eigen::Success
                             ? es.eigenvalues().minCoeff()
                             : std::nan("");
  throw NumericalError(
      "cholesky: factorization failed after jitter escalation to 1e-8; "
      "minimum eigenvalue " + std::to_string(min_eig));
}

std::vector<FieldSample> cholesky_sample(const KernelMatrix& K, int d, Rng& rng,
                                         int count, bool antithetic) {
  if (!K.grid) throw ConfigError("cholesky_sample: kernel has no grid");
  if (d < 1) throw ConfigError("cholesky_sample: d >= 1 required");
  if (count < 1) throw ConfigError("cholesky_sample: count >= 1 required");
  if (antithetic && count % 2 != 0) {
    throw ConfigError("cholesky_sample: antithetic pairing needs an even count");
  }
  const CholeskyFactor F = cholesky_with_jitter(K.entries);
  const Eigen::Index m = K.entries.rows();
  std::vector<FieldSample> out;
  out.reserve(count);
  Eigen::MatrixXd Z(m, d);
  for (int r = 0; r < count; ++r) {
    FieldSample f;
    f.grid = K.grid;
    if (antithetic && r % 2 == 1) {
      f.values = -out.back().values;
    } else {
      for (int c = 0; c < d; ++c) {
        for (Eigen::Index i = 0; i < m; ++i) Z(i, c) = rng.normal();
      }
      f.values = F.L * Z;
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<FieldSample> sample_smoothing_field_kl(
    const SpectralParams& params, std::shared_ptr<const SphereGrid> grid, int d,
    Rng& rng, int count) {
  params.validate();
  if (params.dim_n != 1) {
    throw ConfigError("sample_smoothing_field_kl: explicit basis exists on S^1 only");
  }
  if (!grid || grid->dim_n != 1) {
    throw ConfigError("sample_smoothing_field_kl: S^1 grid required");
  }
  if (d < 1) throw ConfigError("sample_smoothing_field_kl: d >= 1 required");
  if (count < 1) throw ConfigError("sample_smoothing_field_kl: count >= 1 required");

  const int K = params.truncation_K;
  const double n_iota = params.n_iota();
  std::vector<double> coeff_sd(K);
  for (int k = 1; k <= K; ++k) {
    coeff_sd[k - 1] = std::pow(double(eigenvalue(k, 1)), -0.5 * n_iota);
  }
  const std::size_t m = grid->size();
  std::vector<double> theta(m);
  for (std::size_t i = 0; i < m; ++i) {
    theta[i] = std::atan2(grid->points[i].coords[1], grid->points[i].coords[0]);
  }

  std::vector<FieldSample> out;
  out.reserve(count);
  for (int r = 0; r < count; ++r) {
    FieldSample f;
    f.grid = grid;
    f.values.setZero(m, d);
    for (int c = 0; c < d; ++c) {
      for (int k = 1; k <= K; ++k) {
        const double a = coeff_sd[k - 1] * rng.normal();
        const double b = coeff_sd[k - 1] * rng.normal();
        for (std::size_t i = 0; i < m; ++i) {
          f.values(i, c) += (a * std::cos(k * theta[i]) + b * std::sin(k * theta[i])) /
                            std::sqrt(kPi);
        }
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

double paley_wiener_variance(const BandLimitedField& h, double iota) {
  return cm_inner_product(h, h, iota);
}

MonteCarloValue smoothed_test_eval(
    const std::function<double(const FieldSample&)>& zeta, const FieldSample& f,
    double epsilon, double delta, const SpectralParams& params, Rng& rng,
    int mc_count) {
  if (!(epsilon > 0.0)) throw ConfigError("smoothed_test_eval: epsilon > 0 required");
  if (delta < 0.0) throw ConfigError("smoothed_test_eval: delta >= 0 required");
  const FieldSample f_eps = regularize(f, epsilon, params);
  if (delta == 0.0) {
    return MonteCarloValue{zeta(f_eps), 0.0};
  }
  if (mc_count < 2) throw ConfigError("smoothed_test_eval: mc_count >= 2 required");

  std::vector<FieldSample> draws;
  if (f.grid->dim_n == 1) {
    draws = sample_smoothing_field_kl(params, f.grid, f.d(), rng, mc_count);
  } else {
    const KernelMatrix K = covariance_kernel_matrix(f.grid, params);
    draws = cholesky_sample(K, f.d(), rng, mc_count);
  }
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < mc_count; ++r) {
    FieldSample g;
    g.grid = f.grid;
    g.values = f_eps.values + delta * draws[r].values;
    const double v = zeta(g);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / mc_count;
  const double var = std::max(0.0, (sum_sq - mc_count * mean * mean) / (mc_count - 1));
  return MonteCarloValue{mean, std::sqrt(var / mc_count)};
}

void write_samples_csv(const std::vector<FieldSample>& draws,
                       const std::string& path) {
  CsvWriter w(path);
  w.row({"draw_index", "point_index", "coord_index", "value"});
  for (std::size_t r = 0; r < draws.size(); ++r) {
    const FieldSample& f = draws[r];
    for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
      for (Eigen::Index c = 0; c < f.values.cols(); ++c) {
        w.row({std::to_string(r), std::to_string(i), std::to_string(c),
               format_full(f.values(i, c))});
      }
    }
  }
}

}  // namespace steinfield
