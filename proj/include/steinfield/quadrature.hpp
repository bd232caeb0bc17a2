#pragma once

#include <vector>

namespace steinfield {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss–Legendre on [-1, 1] (weights sum to 2), via Golub–Welsch.
QuadratureRule gauss_legendre(int n);

// Gauss–Legendre transplanted to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

// Gauss–Hermite with the standard normal weight: sum w_i f(z_i) ≈ E f(Z),
// Z ~ N(0,1); weights sum to 1.
QuadratureRule gauss_hermite_prob(int n);

// Equiangular rule on the circle: theta_i = 2*pi*i/m, weights 2*pi/m.
// Exact for trigonometric polynomials of degree < m.
QuadratureRule circle_rule(int m);

}  // namespace steinfield
