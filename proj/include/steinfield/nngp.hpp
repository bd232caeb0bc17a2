#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steinfield/field_ops.hpp"
#include "steinfield/gaussian.hpp"
#include "steinfield/rng.hpp"
#include "steinfield/sphere.hpp"

namespace steinfield {

// Weight entry laws, all scaled to Var(W_ij) = c_w / n_in. The student-t
// variant is standardized, so it needs df > 2.
enum class WeightLaw { gaussian, rademacher, uniform, scaled_student_t };

struct WeightLawSpec {
  WeightLaw law = WeightLaw::gaussian;
  double df = 0.0;  // scaled_student_t only

  std::string name() const;
  static WeightLawSpec parse(const std::string& text);  // "scaled-student-t(3.3)"
};

enum class Activation { relu, tanh, identity, custom_lipschitz };

Activation parse_activation(const std::string& text);
std::string activation_name(Activation a);

// Fully connected random network on S^n: widths n_0..n_L with n_0 = n+1,
// layer map F^(l+1) = W^(l) sigma(F^(l)) + b^(l) (no activation on the
// input layer). Biases are always Gaussian with variance c_b. The weight
// law may differ per layer.
struct NetworkSpec {
  std::vector<int> widths;              // n_0 .. n_L
  std::vector<double> c_w;              // layer 0..L-1
  std::vector<double> c_b;              // layer 0..L-1
  std::vector<WeightLawSpec> weight_laws;  // layer 0..L-1
  Activation activation = Activation::relu;
  double lip_constant = 1.0;                     // custom_lipschitz only
  std::function<double(double)> custom_sigma;    // custom_lipschitz only
  unsigned long long seed = 0;

  int L() const { return static_cast<int>(widths.size()) - 1; }
  void validate() const;

  std::string to_json() const;
  static NetworkSpec from_json(const std::string& text);
};

// One draw of the layer-L field at every grid point (weights and biases
// shared across points). d = n_L.
FieldSample sample_network_field(const NetworkSpec& spec, std::shared_ptr<const SphereGrid> grid, Rng& rng);

// E[sigma(U) sigma(V)] for centered jointly Gaussian (U, V) with variances
// v1, v2 and correlation rho: closed forms for relu/identity, tensor
// Gauss-Hermite otherwise. The quadrature variant is the reference used
// to validate the closed forms; for relu it conditions on one variable
// and splits at the kink, so it reaches ~1e-12 despite the non-smoothness.
double bivariate_expectation(Activation act, const std::function<double(double)>& sigma,
                             double v1, double v2, double rho, int gh_nodes = 40);
double relu_bivariate_closed_form(double v1, double v2, double rho);
double bivariate_expectation_quadrature(const std::function<double(double)>& sigma,
                                        double v1, double v2, double rho,
                                        int gh_nodes = 40);
double relu_bivariate_quadrature(double v1, double v2, double rho, int gl_nodes = 160);

// Limiting kernel C^(L)(x, y): the scalar covariance of any one output
// coordinate of the infinitely wide network (coordinates are i.i.d.).
double limiting_covariance(const NetworkSpec& spec, const SpherePoint& x,
                           const SpherePoint& y, int gh_nodes = 40);

// Kernel matrix of limiting_covariance on a grid.
KernelMatrix limiting_kernel_matrix(const NetworkSpec& spec,
                                    std::shared_ptr<const SphereGrid> grid,
                                    int gh_nodes = 40);

// count draws of the limiting Gaussian field (d = n_L i.i.d. coordinates)
// through the Cholesky sampler. With antithetic = true, draws come in
// (+/-) pairs (count must be even).
std::vector<FieldSample> sample_limit_field(const NetworkSpec& spec,
                                            std::shared_ptr<const SphereGrid> grid,
                                            Rng& rng, int count,
                                            bool antithetic = false);

// Conditional (Rao-Blackwellized) covariance estimate of the layer-L
// field: per draw of all layers below the top, the exact conditional
// covariance (c_w^(L-1)/n_{L-1}) sum_k sigma(F_k(x)) sigma(F_k(y)) + c_b,
// averaged over draws. Unbiased for Cov(F^(L)) with std-err shrinking in
// both draw count and width, which makes the width-convergence of the
// second moments measurable. Returns entrywise mean and std-err.
struct CovarianceEstimate {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd std_err;
};
CovarianceEstimate empirical_network_covariance(const NetworkSpec& spec,
                                                std::shared_ptr<const SphereGrid> grid,
                                                Rng& rng, int draws);

// Law-level moment constant B: the standardized 2p-th moment to the power
// 2/p, the smallest B with E[W^{2p}] <= (c_w/n)^p B^{p/2} holding with
// equality. Throws RegimeError when the law lacks 2p moments.
double weight_moment_constant(const WeightLawSpec& law, int p);

// Monte Carlo estimate of E[||W||_op^q] for an n_out x n_in matrix with
// entries of variance c_w/n_in (largest singular value by power
// iteration, relative tolerance 1e-10).
MonteCarloValue operator_norm_moment(const WeightLawSpec& law, int n_in, int n_out,
                                     double c_w, double q, Rng& rng, int reps);

}  // namespace steinfield
