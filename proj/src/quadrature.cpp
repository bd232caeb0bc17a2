#include "steinfield/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "steinfield/errors.hpp"

namespace steinfield {

namespace {

// Golub–Welsch: nodes are eigenvalues of the Jacobi matrix of the
// orthogonal-polynomial recurrence, weights are mu0 * (first eigenvector
// component)^2. The Jacobi matrices here are symmetric tridiagonal with
// zero diagonal (symmetric weight functions).
QuadratureRule golub_welsch(const std::vector<double>& offdiag, double mu0) {
  const int n = int(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n - 1; ++k) {
    J(k, k + 1) = offdiag[std::size_t(k)];
    J(k + 1, k) = offdiag[std::size_t(k)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw NumericalError("quadrature: Jacobi eigendecomposition failed");
  QuadratureRule rule;
  rule.nodes.resize(std::size_t(n));
  rule.weights.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    rule.nodes[std::size_t(i)] = es.eigenvalues()(i);  // ascending
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[std::size_t(i)] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: node count must be >= 1");
  std::vector<double> off(std::size_t(n - 1));
  for (int k = 1; k < n; ++k)
    off[std::size_t(k - 1)] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(off, 2.0);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  QuadratureRule rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

QuadratureRule gauss_hermite_prob(int n) {
  if (n < 1) throw ConfigError("gauss_hermite_prob: node count must be >= 1");
  std::vector<double> off(std::size_t(n - 1));
  for (int k = 1; k < n; ++k) off[std::size_t(k - 1)] = std::sqrt(double(k));
  return golub_welsch(off, 1.0);
}

QuadratureRule circle_rule(int m) {
  if (m < 1) throw ConfigError("circle_rule: node count must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(std::size_t(m));
  rule.weights.assign(std::size_t(m), 2.0 * M_PI / m);
  for (int i = 0; i < m; ++i)
    rule.nodes[std::size_t(i)] = 2.0 * M_PI * i / m;
  return rule;
}

}  // namespace steinfield
