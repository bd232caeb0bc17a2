// =============================================================================
// Field-operation tests: sup-norm, heat-kernel regularization (decay,
// contraction, and the modulus + escaped-mass decomposition), modulus of
// continuity with its strict-inequality pair rule, and the band-limited
// Fourier machinery with its Cameron-Martin inner product.
// =============================================================================

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "steinfield/errors.hpp"
#include "steinfield/field_ops.hpp"
#include "steinfield/rng.hpp"
#include "steinfield/spectral.hpp"
#include "steinfield/sphere.hpp"

using namespace steinfield;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const SphereGrid> circle_grid(int m) {
  return std::make_shared<SphereGrid>(quadrature_nodes(1, m));
}

double angle_of(const SpherePoint& p) {
  double a = std::atan2(p.coords[1], p.coords[0]);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

FieldSample from_function(std::shared_ptr<const SphereGrid> grid,
                          const std::function<double(double)>& f) {
  FieldSample s;
  s.grid = grid;
  s.values.resize(grid->size(), 1);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    s.values(i, 0) = f(angle_of(grid->points[i]));
  }
  return s;
}

SpectralParams params_s1(int K = 256) {
  SpectralParams p;
  p.dim_n = 1;
  p.iota = 1.0;
  p.truncation_K = K;
  return p;
}
}  // namespace

TEST_CASE("sup norm: zero, constants, and a coordinate function") {
  auto grid = circle_grid(256);
  FieldSample zero;
  zero.grid = grid;
  zero.values = Eigen::MatrixXd::Zero(grid->size(), 3);
  CHECK(sup_norm(zero) == 0.0);

  FieldSample c;
  c.grid = grid;
  c.values.resize(grid->size(), 2);
  c.values.col(0).setConstant(3.0);
  c.values.col(1).setConstant(-4.0);
  CHECK(sup_norm(c) == doctest::Approx(5.0).epsilon(1e-15));

  const FieldSample x1 = from_function(grid, [](double t) { return std::cos(t); });
  CHECK(sup_norm(x1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("regularize: constants are fixed, modes decay, and the map is linear") {
  auto grid = circle_grid(128);
  const SpectralParams p = params_s1();

  const FieldSample ones = from_function(grid, [](double) { return 1.0; });
  const FieldSample ones_eps = regularize(ones, 0.1, p);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    CHECK(std::fabs(ones_eps.values(i, 0) - 1.0) < 1e-8);
  }

  const int k = 3;
  const double eps = 0.1;
  const FieldSample mode =
      from_function(grid, [&](double t) { return std::cos(k * t); });
  const FieldSample mode_eps = regularize(mode, eps, p);
  const double decay = std::exp(-0.5 * eps * k * k);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    CHECK(std::fabs(mode_eps.values(i, 0) - decay * mode.values(i, 0)) < 1e-7);
  }

  const FieldSample g = from_function(grid, [](double t) {
    return std::sin(2.0 * t) - 0.5 * std::cos(5.0 * t);
  });
  FieldSample combo;
  combo.grid = grid;
  combo.values = 2.0 * mode.values - 3.0 * g.values;
  const FieldSample lhs = regularize(combo, eps, p);
  const FieldSample rhs_a = regularize(mode, eps, p);
  const FieldSample rhs_b = regularize(g, eps, p);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    CHECK(std::fabs(lhs.values(i, 0) -
                    (2.0 * rhs_a.values(i, 0) - 3.0 * rhs_b.values(i, 0))) < 1e-12);
  }

  // A grid without weights cannot integrate.
  Rng rng(5);
  auto raw = std::make_shared<SphereGrid>(uniform_grid(rng, 1, 32));
  FieldSample on_raw;
  on_raw.grid = raw;
  on_raw.values = Eigen::MatrixXd::Zero(32, 1);
  CHECK_THROWS_AS(regularize(on_raw, 0.1, p), ConfigError);
}

TEST_CASE("regularize error shrinks as eps does on a smooth field") {
  auto grid = circle_grid(128);
  const SpectralParams p = params_s1();
  const FieldSample f = from_function(grid, [](double t) {
    return std::cos(t) + 0.3 * std::sin(2.0 * t);
  });
  double prev = 1e9;
  for (double eps : {0.2, 0.1, 0.05}) {
    const FieldSample fe = regularize(f, eps, p);
    FieldSample diff;
    diff.grid = grid;
    diff.values = fe.values - f.values;
    const double err = sup_norm(diff);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("regularize is a sup-norm contraction for nonnegative kernels") {
  auto grid = circle_grid(128);
  const SpectralParams p = params_s1();
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    FieldSample f = from_function(grid, [&](double t) {
      double v = 0.0;
      for (int k = 1; k <= 6; ++k) v += rng.normal() * std::cos(k * t + rng.uniform());
      return v;
    });
    for (double eps : {0.05, 0.1, 0.3}) {
      CHECK(sup_norm(regularize(f, eps, p)) <= sup_norm(f) + 1e-8);
    }
  }
}

TEST_CASE("modulus of continuity: constants, cosine extremes, strictness") {
  auto grid = circle_grid(512);
  const FieldSample c = from_function(grid, [](double) { return 2.5; });
  CHECK(modulus_of_continuity(c, 1.0) == 0.0);

  // f(x) = x1 = cos(theta): sup over |a-b| < pi/3 of |cos a - cos b| = 1,
  // approached from below on a finite grid.
  const FieldSample f = from_function(grid, [](double t) { return std::cos(t); });
  const double w_third = modulus_of_continuity(f, kPi / 3.0);
  CHECK(w_third <= 1.0);
  CHECK(w_third >= 0.99);

  // Monotone in theta.
  double prev = 0.0;
  for (double theta : {0.1, 0.5, 1.0, 2.0, 3.2}) {
    const double w = modulus_of_continuity(f, theta);
    CHECK(w >= prev);
    prev = w;
  }

  // Pairs at distance >= theta are excluded (strict inequality): on an
  // m-point equiangular grid the minimal positive distance is the grid
  // spacing, so any theta below it sees no pair at all. (Rounding in the
  // arc-cosine can place the spacing itself a hair on either side, so the
  // probe sits strictly below.)
  auto coarse = circle_grid(16);
  const double spacing = 2.0 * kPi / 16.0;
  const FieldSample g = from_function(coarse, [](double t) { return std::sin(t); });
  CHECK(modulus_of_continuity(g, spacing * (1.0 - 1e-9)) == 0.0);
  CHECK(modulus_of_continuity(g, spacing * 1.01) > 0.0);
}

TEST_CASE("smoothing error decomposes into modulus plus escaped mass") {
  auto grid = circle_grid(128);
  const SpectralParams p = params_s1();
  Rng rng(11);
  FieldSample f = from_function(grid, [&](double t) {
    double v = 0.0;
    for (int k = 1; k <= 5; ++k) v += rng.normal() * std::sin(k * t + rng.uniform());
    return v;
  });
  const double eps = 0.1;
  const FieldSample fe = regularize(f, eps, p);
  FieldSample diff;
  diff.grid = grid;
  diff.values = fe.values - f.values;
  const double lhs = sup_norm(diff);

  for (double theta : {0.3, 0.6, 1.0, 2.0}) {
    // Largest quadrature mass of the heat kernel outside the theta-ball.
    double outside = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < grid->size(); ++j) {
        if (geodesic_distance(grid->points[i], grid->points[j]) >= theta) {
          s += grid->weights[j] *
               heat_kernel(grid->points[i], grid->points[j], eps, p);
        }
      }
      outside = std::max(outside, s);
    }
    const double rhs =
        modulus_of_continuity(f, theta) + 2.0 * sup_norm(f) * outside;
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("Fourier analysis: round trip, single-mode values, Parseval") {
  auto grid = circle_grid(64);
  Rng rng(13);

  BandLimitedField h;
  h.d = 2;
  h.cos_coeffs.resize(10, 2);
  h.sin_coeffs.resize(10, 2);
  h.const_coeff.resize(2);
  for (int k = 0; k < 10; ++k) {
    for (int j = 0; j < 2; ++j) {
      h.cos_coeffs(k, j) = rng.normal();
      h.sin_coeffs(k, j) = rng.normal();
    }
  }
  h.const_coeff << rng.normal(), rng.normal();

  const FieldSample f = synthesize(h, grid);
  const BandLimitedField back = to_band_limited(f, 10);
  CHECK((back.cos_coeffs - h.cos_coeffs).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.sin_coeffs - h.sin_coeffs).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.const_coeff - h.const_coeff).cwiseAbs().maxCoeff() < 1e-12);

  // cos(theta) has a single cosine coefficient sqrt(pi) at degree 1.
  const FieldSample c1 = from_function(grid, [](double t) { return std::cos(t); });
  const BandLimitedField bc = to_band_limited(c1, 8);
  CHECK(bc.cos_coeffs(0, 0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
  CHECK(std::fabs(bc.const_coeff(0)) < 1e-12);
  for (int k = 1; k < 8; ++k) CHECK(std::fabs(bc.cos_coeffs(k, 0)) < 1e-12);
  CHECK(bc.sin_coeffs.cwiseAbs().maxCoeff() < 1e-12);

  // Parseval: coefficient energy equals the quadrature L2 norm.
  double coeff_energy = h.const_coeff.squaredNorm() + h.cos_coeffs.squaredNorm() +
                        h.sin_coeffs.squaredNorm();
  double quad_energy = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    quad_energy += grid->weights[i] * f.values.row(i).squaredNorm();
  }
  CHECK(coeff_energy == doctest::Approx(quad_energy).epsilon(1e-10));

  // Aliasing guard and grid requirements.
  CHECK_THROWS_AS(to_band_limited(f, 32), ConfigError);
  Rng rng2(14);
  auto raw = std::make_shared<SphereGrid>(uniform_grid(rng2, 1, 64));
  FieldSample on_raw;
  on_raw.grid = raw;
  on_raw.values = Eigen::MatrixXd::Zero(64, 1);
  CHECK_THROWS_AS(to_band_limited(on_raw, 8), ConfigError);
}

TEST_CASE("band-limited heat decay matches grid regularization") {
  auto grid = circle_grid(64);
  Rng rng(15);
  BandLimitedField h;
  h.d = 1;
  h.cos_coeffs.resize(6, 1);
  h.sin_coeffs.resize(6, 1);
  h.const_coeff.resize(1);
  for (int k = 0; k < 6; ++k) {
    h.cos_coeffs(k, 0) = rng.normal();
    h.sin_coeffs(k, 0) = rng.normal();
  }
  h.const_coeff << 0.7;

  const double eps = 0.15;
  const FieldSample via_grid = regularize(synthesize(h, grid), eps, params_s1());
  const FieldSample via_coeff = synthesize(band_limited_heat(h, eps), grid);
  CHECK((via_grid.values - via_coeff.values).cwiseAbs().maxCoeff() < 1e-9);
  // The constant coefficient is untouched by the semigroup.
  CHECK(band_limited_heat(h, eps).const_coeff(0) == h.const_coeff(0));
}

TEST_CASE("Cameron-Martin inner product: values, bilinearity, positivity") {
  // Unit degree-1 cosine mode on S^1 with iota = 1: <h,h>_H = lambda_1 = 1.
  BandLimitedField e1;
  e1.d = 1;
  e1.cos_coeffs = Eigen::MatrixXd::Zero(3, 1);
  e1.sin_coeffs = Eigen::MatrixXd::Zero(3, 1);
  e1.const_coeff = Eigen::VectorXd::Zero(1);
  e1.cos_coeffs(0, 0) = 1.0;
  CHECK(cm_inner_product(e1, e1, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

  // Disjoint degrees are orthogonal.
  BandLimitedField e3 = e1;
  e3.cos_coeffs.setZero();
  e3.cos_coeffs(2, 0) = 1.0;
  CHECK(cm_inner_product(e1, e3, 1.0) == 0.0);

  // Degree-0 coefficients are invisible to the inner product.
  BandLimitedField shifted = e1;
  shifted.const_coeff(0) = 42.0;
  CHECK(cm_inner_product(shifted, shifted, 1.0) ==
        cm_inner_product(e1, e1, 1.0));

  Rng rng(19);
  auto random_field = [&]() {
    BandLimitedField h;
    h.d = 2;
    h.cos_coeffs.resize(5, 2);
    h.sin_coeffs.resize(5, 2);
    h.const_coeff.resize(2);
    for (int k = 0; k < 5; ++k) {
      for (int j = 0; j < 2; ++j) {
        h.cos_coeffs(k, j) = rng.normal();
        h.sin_coeffs(k, j) = rng.normal();
      }
    }
    h.const_coeff.setZero();
    return h;
  };
  const BandLimitedField a = random_field(), b = random_field(), c = random_field();

  // Symmetry, positivity, bilinearity.
  CHECK(cm_inner_product(a, b, 1.5) == doctest::Approx(cm_inner_product(b, a, 1.5)));
  CHECK(cm_inner_product(a, a, 1.5) >= 0.0);
  BandLimitedField combo = a;
  combo.cos_coeffs = 2.0 * a.cos_coeffs - 0.5 * b.cos_coeffs;
  combo.sin_coeffs = 2.0 * a.sin_coeffs - 0.5 * b.sin_coeffs;
  const double lhs = cm_inner_product(combo, c, 1.5);
  const double rhs =
      2.0 * cm_inner_product(a, c, 1.5) - 0.5 * cm_inner_product(b, c, 1.5);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  // Different band limits behave as if the shorter field were zero-padded.
  BandLimitedField shorter;
  shorter.d = 2;
  shorter.cos_coeffs = a.cos_coeffs.topRows(2);
  shorter.sin_coeffs = a.sin_coeffs.topRows(2);
  shorter.const_coeff = Eigen::VectorXd::Zero(2);
  double expected = 0.0;
  for (int k = 1; k <= 2; ++k) {
    expected += std::pow(double(k) * double(k), 1.25) *
                (shorter.cos_coeffs.row(k - 1).dot(b.cos_coeffs.row(k - 1)) +
                 shorter.sin_coeffs.row(k - 1).dot(b.sin_coeffs.row(k - 1)));
  }
  CHECK(cm_inner_product(shorter, b, 1.5) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("field csv layout") {
  auto grid = circle_grid(8);
  FieldSample f;
  f.grid = grid;
  f.values.resize(8, 2);
  f.values.setConstant(1.25);
  const std::string path = "test_field_out.csv";
  write_field_csv(f, path);
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::size_t lines = 0, pos = 0;
  while ((pos = text.find("\r\n", pos)) != std::string::npos) {
    ++lines;
    pos += 2;
  }
  CHECK(lines == 8 * 2 + 1);
  CHECK(text.rfind("point_index,coord_index,value", 0) == 0);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("field validation rejects shape mismatches") {
  auto grid = circle_grid(8);
  FieldSample bad;
  bad.grid = grid;
  bad.values = Eigen::MatrixXd::Zero(7, 1);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.values = Eigen::MatrixXd::Zero(8, 1);
  CHECK_NOTHROW(bad.validate());
  bad.values(3, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
