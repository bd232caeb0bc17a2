#include "steinfield/field_ops.hpp"

#include <cmath>
#include <string>

#include "steinfield/csv.hpp"
#include "steinfield/errors.hpp"

namespace steinfield {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Angle of an S^1 grid point, in [0, 2 pi).
double angle_of(const SpherePoint& p) {
  const double t = std::atan2(p.coords[1], p.coords[0]);
  return t < 0.0 ? t + 2.0 * kPi : t;
}

void require_s1(const SphereGrid& g, const char* where) {
  if (g.dim_n != 1) {
    throw ConfigError(std::string(where) + ": band-limited machinery exists on S^1 only");
  }
}
}  // namespace

void FieldSample::validate() const {
  if (!grid) throw ConfigError("FieldSample: missing grid");
  if (static_cast<std::size_t>(values.rows()) != grid->size()) {
    throw ConfigError("FieldSample: row count does not match grid size");
  }
  if (values.cols() < 1) throw ConfigError("FieldSample: d >= 1 required");
  if (!values.allFinite()) throw ConfigError("FieldSample: non-finite entries");
}

double sup_norm(const FieldSample& f) {
  f.validate();
  if (f.grid->size() == 0) throw ConfigError("sup_norm: empty grid");
  return f.values.rowwise().norm().maxCoeff();
}

FieldSample regularize(const FieldSample& f, double epsilon,
                       const SpectralParams& params) {
  f.validate();
  if (!(epsilon > 0.0)) throw ConfigError("regularize: epsilon > 0 required");
  const SphereGrid& g = *f.grid;
  if (!g.has_weights()) {
    throw ConfigError("regularize: grid carries no quadrature weights");
  }
  const std::size_t m = g.size();
  std::vector<double> cos_angles;
  cos_angles.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cos_angles.push_back(g.points[i].coords.dot(g.points[j].coords));
    }
  }
  const std::vector<double> p = heat_kernel_batch(cos_angles, epsilon, params);
  Eigen::MatrixXd P(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      P(i, j) = p[i * m + j] * g.weights[j];
    }
  }
  FieldSample out;
  out.grid = f.grid;
  out.values = P * f.values;
  return out;
}

double modulus_of_continuity(const FieldSample& f, double theta) {
  f.validate();
  if (!(theta > 0.0)) throw ConfigError("modulus_of_continuity: theta > 0 required");
  const SphereGrid& g = *f.grid;
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      if (geodesic_distance(g.points[i], g.points[j]) < theta) {
        best = std::max(best, (f.values.row(i) - f.values.row(j)).norm());
      }
    }
  }
  return best;
}

BandLimitedField to_band_limited(const FieldSample& f, int K) {
  f.validate();
  require_s1(*f.grid, "to_band_limited");
  const SphereGrid& g = *f.grid;
  if (g.construction_tag != "equiangular") {
    throw ConfigError("to_band_limited: equiangular grid required");
  }
  const int m = static_cast<int>(g.size());
  if (K < 1 || 2 * K >= m) {
    throw ConfigError("to_band_limited: need 1 <= K < m/2 (aliasing limit)");
  }
  const int d = f.d();
  const double w = 2.0 * kPi / m;

  BandLimitedField h;
  h.d = d;
  h.cos_coeffs.setZero(K, d);
  h.sin_coeffs.setZero(K, d);
  h.const_coeff.setZero(d);
  for (int i = 0; i < m; ++i) {
    const double theta = angle_of(g.points[i]);
    for (int c = 0; c < d; ++c) {
      h.const_coeff[c] += w * f.values(i, c) / std::sqrt(2.0 * kPi);
      for (int k = 1; k <= K; ++k) {
        h.cos_coeffs(k - 1, c) += w * f.values(i, c) * std::cos(k * theta) / std::sqrt(kPi);
        h.sin_coeffs(k - 1, c) += w * f.values(i, c) * std::sin(k * theta) / std::sqrt(kPi);
      }
    }
  }
  return h;
}

FieldSample synthesize(const BandLimitedField& h,
                       std::shared_ptr<const SphereGrid> grid) {
  if (!grid) throw ConfigError("synthesize: missing grid");
  require_s1(*grid, "synthesize");
  const int m = static_cast<int>(grid->size());
  FieldSample f;
  f.grid = std::move(grid);
  f.values.setZero(m, h.d);
  for (int i = 0; i < m; ++i) {
    const double theta = angle_of(f.grid->points[i]);
    for (int c = 0; c < h.d; ++c) {
      double v = h.const_coeff[c] / std::sqrt(2.0 * kPi);
      for (int k = 1; k <= h.degree(); ++k) {
        v += (h.cos_coeffs(k - 1, c) * std::cos(k * theta) +
              h.sin_coeffs(k - 1, c) * std::sin(k * theta)) /
             std::sqrt(kPi);
      }
      f.values(i, c) = v;
    }
  }
  return f;
}

BandLimitedField band_limited_heat(const BandLimitedField& h, double eps) {
  if (!(eps > 0.0)) throw ConfigError("band_limited_heat: eps > 0 required");
  BandLimitedField out = h;
  for (int k = 1; k <= h.degree(); ++k) {
    const double decay = std::exp(-0.5 * eps * double(k) * double(k));
    out.cos_coeffs.row(k - 1) *= decay;
    out.sin_coeffs.row(k - 1) *= decay;
  }
  return out;
}

double cm_inner_product(const BandLimitedField& f, const BandLimitedField& g,
                        double iota) {
  if (f.d != g.d) throw ConfigError("cm_inner_product: coordinate counts differ");
  if (!(iota > 0.0)) throw ConfigError("cm_inner_product: iota > 0 required");
  const double n_iota = 0.5 * (1.0 + iota);
  const int K = std::min(f.degree(), g.degree());
  double acc = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double lam_pow = std::pow(double(k) * double(k), n_iota);
    acc += lam_pow * (f.cos_coeffs.row(k - 1).dot(g.cos_coeffs.row(k - 1)) +
                      f.sin_coeffs.row(k - 1).dot(g.sin_coeffs.row(k - 1)));
  }
  return acc;
}

void write_field_csv(const FieldSample& f, const std::string& path) {
  f.validate();
  CsvWriter w(path);
  w.row({"point_index", "coord_index", "value"});
  for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
    for (Eigen::Index c = 0; c < f.values.cols(); ++c) {
      w.row({std::to_string(i), std::to_string(c), format_full(f.values(i, c))});
    }
  }
}

}  // namespace steinfield
