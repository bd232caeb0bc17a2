#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steinfield/rng.hpp"

namespace steinfield {

// A point on the n-sphere stored as a unit vector in R^{n+1}.
// Construction normalizes; a zero input vector is rejected.
struct SpherePoint {
  Eigen::VectorXd coords;

  SpherePoint() = default;
  explicit SpherePoint(Eigen::VectorXd c);

  int dim_n() const { return static_cast<int>(coords.size()) - 1; }
};

// Finite point set on S^n, optionally carrying quadrature weights with
// respect to (unnormalized) surface measure.
struct SphereGrid {
  int dim_n = 1;
  std::vector<SpherePoint> points;
  std::vector<double> weights;  // empty when the grid carries no rule
  std::string construction_tag; // equiangular | product-quadrature |
                                // fibonacci | uniform-random

  std::size_t size() const { return points.size(); }
  bool has_weights() const { return !weights.empty(); }
};

// Geodesic distance on S^n: arccos of the inner product, clamped to
// [-1, 1] so that rounding near antipodal/identical pairs stays finite.
double geodesic_distance(const SpherePoint& x, const SpherePoint& y);

// Euclidean (chordal) distance in the ambient space. Satisfies
// chordal <= geodesic pointwise.
double chordal_distance(const SpherePoint& x, const SpherePoint& y);

// Surface area of S^n: 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_area(int n);

// i.i.d. uniform points on S^n (normalized standard Gaussian vectors).
std::vector<SpherePoint> uniform_sample(Rng& rng, int n, int count);

// Uniform random grid (no weights), tag "uniform-random".
SphereGrid uniform_grid(Rng& rng, int n, int count);

// Quadrature grid with weights summing to the surface area.
//   n = 1: `level` equiangular nodes, weights 2 pi / level; exact for
//          trigonometric polynomials of degree < level.
//   n = 2: Gauss-Legendre rule with `level` nodes in cos(polar) crossed
//          with 2*level+1 equal-weight azimuths; exact for spherical
//          polynomials of degree <= 2*level - 1.
// Other n: rejected (Monte Carlo grids only).
SphereGrid quadrature_nodes(int n, int level);

// Golden-angle spiral grid on S^2 (no weights), tag "fibonacci".
// Quasi-uniform; useful as an evaluation grid, not a quadrature rule.
SphereGrid fibonacci_grid(int count);

// Farthest-point greedy epsilon-net over the grid, seeded at point 0.
// Every grid point ends within geodesic `eps` of some net point.
SphereGrid greedy_net(const SphereGrid& grid, double eps);

// Upper bound ceil(c_n * eps^{-n}) on the geodesic covering number of
// S^n. Defaults: c_1 = pi (exact for the circle), c_2 = 16 (volume-ratio
// bound with a safety factor). For n >= 3 a positive c_override is
// required since no default constant is declared.
long long covering_number_bound(int n, double eps, double c_override = 0.0);

// Grid serialization: header `coord_0,...,coord_n[,weight]`, one row per
// point, shortest round-trip float format.
void write_grid_csv(const SphereGrid& grid, const std::string& path);

}  // namespace steinfield
