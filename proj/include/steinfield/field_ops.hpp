#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steinfield/spectral.hpp"
#include "steinfield/sphere.hpp"

namespace steinfield {

// Values of a d-coordinate field at the points of a grid; the universal
// carrier for sampled fields. Row i holds the field at grid point i.
struct FieldSample {
  std::shared_ptr<const SphereGrid> grid;
  Eigen::MatrixXd values;  // |grid| x d

  int d() const { return static_cast<int>(values.cols()); }
  void validate() const;  // shape/finiteness checks; throws ConfigError
};

// Band-limited field on S^1 in the orthonormal Fourier basis
//   cos(k theta)/sqrt(pi), sin(k theta)/sqrt(pi)  (k >= 1),
//   constant 1/sqrt(2 pi)  (degree 0, tracked separately).
struct BandLimitedField {
  int d = 1;
  Eigen::MatrixXd cos_coeffs;   // K x d
  Eigen::MatrixXd sin_coeffs;   // K x d
  Eigen::VectorXd const_coeff;  // d

  int degree() const { return static_cast<int>(cos_coeffs.rows()); }
};

// sup-norm surrogate: max over grid points of the Euclidean coordinate norm.
double sup_norm(const FieldSample& f);

// Heat-kernel smoothing at time epsilon, evaluated with the grid's own
// quadrature rule (the grid must carry weights): g(x) = sum_y w_y p(x,y) f(y).
FieldSample regularize(const FieldSample& f, double epsilon,
                       const SpectralParams& params);

// Max of ||f(x) - f(y)||_2 over grid pairs at geodesic distance strictly
// below theta; 0 when no pair qualifies.
double modulus_of_continuity(const FieldSample& f, double theta);

// Discrete Fourier analysis of a field sampled on an equiangular S^1 grid;
// requires K < m/2 so every retained mode is below the aliasing limit.
BandLimitedField to_band_limited(const FieldSample& f, int K);

// Evaluates a band-limited field at the points of any S^1 grid.
FieldSample synthesize(const BandLimitedField& h,
                       std::shared_ptr<const SphereGrid> grid);

// Multiplies degree-k coefficients by exp(-eps * k^2 / 2) (heat decay on
// S^1); the degree-0 coefficient is fixed by the semigroup.
BandLimitedField band_limited_heat(const BandLimitedField& h, double eps);

// sum_{k>=1} lambda_k^{n_iota} sum_{i,j} f_{k,i}^{(j)} g_{k,i}^{(j)} on S^1;
// degree-0 coefficients are ignored. Fields of different degrees are
// padded with zeros.
double cm_inner_product(const BandLimitedField& f, const BandLimitedField& g,
                        double iota);

// Field serialization: columns `point_index, coord_index, value`.
void write_field_csv(const FieldSample& f, const std::string& path);

}  // namespace steinfield
