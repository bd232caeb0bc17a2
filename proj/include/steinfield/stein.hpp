#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steinfield/gaussian.hpp"
#include "steinfield/quadrature.hpp"
#include "steinfield/rng.hpp"

namespace steinfield {

// Test functional evaluated column-wise: input m x N, output N values.
// Batching is what keeps the Monte Carlo path tractable.
using BatchFunctional = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

// Lifts a per-vector functional into the batched form.
BatchFunctional lift_pointwise(std::function<double(const Eigen::VectorXd&)> f);

// Finite-dimensional problem: centered Gaussian with covariance sigma,
// test functional zeta, and the numerical budget. mc = 0 selects the
// deterministic tensor Gauss-Hermite path (dim <= 4); mc > 0 uses a
// cached antithetic-paired Gaussian stream shared by every expectation
// the solver computes (common random numbers, so finite-difference
// derivatives see quadrature-smooth values).
struct SteinProblem {
  Eigen::MatrixXd sigma;
  BatchFunctional zeta;
  int t_nodes = 64;   // Gauss-Legendre count for the time integral
  int gh_nodes = 16;  // per-dimension Gauss-Hermite count (mc == 0)
  int mc = 0;
  unsigned long long seed = 1;
};

// Solves the equation  sum sigma_ij d_ij eta - sum f_i d_i eta =
// zeta(f) - E[zeta(G)]  through the Ornstein-Uhlenbeck semigroup
// representation eta(f) = -int_0^inf (E[zeta(e^{-t} f +
// sqrt(1-e^{-2t}) G)] - E[zeta(G)]) dt, evaluated after the
// substitution u = e^{-t} as a Gauss-Legendre integral over (0, 1].
class SteinSolver {
 public:
  explicit SteinSolver(SteinProblem problem);

  int dim() const { return static_cast<int>(problem_.sigma.rows()); }
  const SteinProblem& problem() const { return problem_; }

  // E[zeta(e^{-t} f + sqrt(1-e^{-2t}) G)]; std_err is 0 on the
  // quadrature path.
  MonteCarloValue semigroup_value(const Eigen::VectorXd& f, double t) const;

  double expect_zeta_gaussian() const { return ezg_; }
  // Standard error of the E[zeta(G)] estimate; 0 on the quadrature path.
  double expect_zeta_std_err() const { return ezg_std_err_; }
  double zeta_at(const Eigen::VectorXd& f) const;

  // eta(f). Throws NumericalError when halving the node count moves the
  // value by more than the convergence heuristic allows.
  double solution(const Eigen::VectorXd& f) const;

  // Central finite differences of eta; step 1e-4 * (1 + ||f||).
  double fd_step(const Eigen::VectorXd& f) const;
  Eigen::VectorXd solution_gradient(const Eigen::VectorXd& f) const;
  Eigen::MatrixXd solution_hessian(const Eigen::VectorXd& f) const;

  // sum_ij sigma_ij d_ij eta(f) - sum_i f_i d_i eta(f) - zeta(f) +
  // E[zeta(G)]; identically 0 for the exact solution.
  double residual(const Eigen::VectorXd& f) const;

  // One draw of G = chol(sigma) * z, for picking test locations.
  Eigen::VectorXd gaussian_point(Rng& rng) const;

 private:
  double eta_with_rule(const Eigen::VectorXd& f, const QuadratureRule& rule,
                       Eigen::MatrixXd& buf) const;
  double weighted_zeta(double u, const Eigen::VectorXd& f, Eigen::MatrixXd& buf) const;

  SteinProblem problem_;
  Eigen::MatrixXd chol_;    // factor of sigma
  Eigen::MatrixXd nodes_;   // m x N Gaussian evaluation points (already through chol)
  Eigen::VectorXd wts_;     // N weights (uniform 1/N on the MC path)
  bool mc_path_ = false;
  double ezg_ = 0.0;        // E[zeta(G)]
  double ezg_std_err_ = 0.0;
  QuadratureRule t_rule_hi_, t_rule_lo_;
};

// The max-ratio report of one derivative-bound or residual check.
struct SteinCaseReport {
  std::string case_name;
  double bound = 0.0;
  double estimate = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

// Max over random Gaussian base points of the dual-norm size of the k-th
// derivative of eta (k = 1: l1 norm of the gradient; k = 2: bilinear
// sup over the unit cube), compared against (1/k) * sup ||D^k zeta||.
// pass allows 5% finite-difference headroom.
SteinCaseReport derivative_bound_check(const SteinSolver& solver, int k,
                                       int trial_count, double sup_dk_zeta,
                                       Rng& rng, const std::string& case_name);

// Max over random point pairs of ||D^2 eta(f) - D^2 eta(h)|| per unit
// ||f - h||_inf, compared against the coefficient 1/3.
SteinCaseReport hessian_difference_check(const SteinSolver& solver, int trial_count,
                                         Rng& rng, const std::string& case_name);

// sup over the unit cube pair of |g^T H h| (exact corner enumeration).
double cube_bilinear_norm(const Eigen::MatrixXd& H);

// The fixed 20-case verification suite (residual identities, gradient and
// Hessian bounds, Hessian differences) over linear / quadratic / sine /
// bump functionals in dimensions 1, 2, 4. Deterministic in the seed.
std::vector<SteinCaseReport> run_stein_suite(unsigned long long master_seed);

}  // namespace steinfield
