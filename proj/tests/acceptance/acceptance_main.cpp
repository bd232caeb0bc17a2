// =============================================================================
// Acceptance gate. Nine numbered criteria, each printed as a single
// PASS/FAIL line with its wall time and a short detail string; the
// process exits 0 only when every criterion passes.
//
//   1  spectral identities: zonal reproducing property, heat-kernel mass,
//      heat semigroup
//   2  eigenfunction decay of heat-kernel regularization on the circle
//   3  smoothing-field law: KL covariance vs the truncated kernel, and a
//      KL-vs-Cholesky two-sample energy test
//   4  wide-network recursion: ReLU closed form vs quadrature, and
//      width-monotone convergence of the conditional covariance
//   5  the 20-case Stein verification suite
//   6  convergence experiment: strict width decrease and log-log slope
//   7  chaining-check experiment: empirical modulus tails under the bound
//   8  closed-form bound evaluators at their hand-computed anchors
//   9  determinism: byte-identical CSV output across CLI re-runs
// =============================================================================

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#if !defined(_WIN32)
#include <sys/wait.h>
#endif

#include <Eigen/Dense>

#include "steinfield/bounds.hpp"
#include "steinfield/config.hpp"
#include "steinfield/errors.hpp"
#include "steinfield/experiments.hpp"
#include "steinfield/gaussian.hpp"
#include "steinfield/metrics.hpp"
#include "steinfield/nngp.hpp"
#include "steinfield/rng.hpp"
#include "steinfield/spectral.hpp"
#include "steinfield/sphere.hpp"
#include "steinfield/stein.hpp"

using namespace steinfield;

namespace {

// ---------------------------------------------------------------------------
// Reporting scaffold
// ---------------------------------------------------------------------------

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double dot(const SpherePoint& x, const SpherePoint& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.coords.size(); ++i) s += x.coords[i] * y.coords[i];
  return s;
}

std::vector<std::size_t> probe_indices(std::size_t grid_size, std::size_t count) {
  std::vector<std::size_t> idx;
  for (std::size_t t = 0; t < count; ++t) idx.push_back(t * grid_size / count);
  return idx;
}

// Minimal CSV reader for the experiment outputs (CRLF rows, no quoting
// in any field these files emit).
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Swallows experiment stdout so the gate prints exactly one line per
// criterion.
struct SilenceCout {
  std::ostringstream sink;
  std::streambuf* saved;
  SilenceCout() : saved(std::cout.rdbuf(sink.rdbuf())) {}
  ~SilenceCout() { std::cout.rdbuf(saved); }
};

int run_cli(const std::string& args) {
  const std::string cmd =
      "\"" STEINFIELD_CLI_PATH "\" " + args + " > acc_tmp/cli_log.txt 2>&1";
  const int status = std::system(cmd.c_str());
#if defined(_WIN32)
  return status;
#else
  if (!WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
#endif
}

// ---------------------------------------------------------------------------
// 1. Spectral identities
// ---------------------------------------------------------------------------

Outcome criterion_spectral_identities() {
  Outcome out;

  // Zonal reproducing property: integrating Z_k against Z_l over the
  // sphere returns delta_{kl} Z_k. Checked on quadrature grids exact for
  // the polynomial degrees involved, at probe point pairs.
  double worst_repro = 0.0;
  for (int n : {1, 2}) {
    const SphereGrid grid = n == 1 ? quadrature_nodes(1, 64) : quadrature_nodes(2, 24);
    const std::size_t m = grid.size();
    const std::vector<std::size_t> probes = probe_indices(m, 8);
    for (int k = 1; k <= 6; ++k) {
      for (int l = 1; l <= 6; ++l) {
        for (std::size_t pi : probes) {
          for (std::size_t pj : probes) {
            double integral = 0.0;
            for (std::size_t q = 0; q < m; ++q) {
              integral += grid.weights[q] *
                          zonal(k, n, dot(grid.points[pi], grid.points[q])) *
                          zonal(l, n, dot(grid.points[q], grid.points[pj]));
            }
            const double target =
                k == l ? zonal(k, n, dot(grid.points[pi], grid.points[pj])) : 0.0;
            worst_repro = std::max(worst_repro, std::fabs(integral - target));
          }
        }
      }
    }
  }
  out.require(worst_repro < 1e-7, "reproducing error " + fmt(worst_repro));
  out.note("reproducing " + fmt(worst_repro));

  // Heat-kernel mass: the kernel is a probability density in its second
  // argument, so its quadrature integral is 1.
  double worst_mass = 0.0;
  for (int n : {1, 2}) {
    const SphereGrid grid = n == 1 ? quadrature_nodes(1, 64) : quadrature_nodes(2, 24);
    SpectralParams params;
    params.dim_n = n;
    for (double eps : {0.05, 0.1, 0.2}) {
      params.truncation_K = truncation_level_heat(params, eps);
      for (std::size_t pi : probe_indices(grid.size(), n == 1 ? 64 : 16)) {
        double mass = 0.0;
        for (std::size_t q = 0; q < grid.size(); ++q) {
          mass += grid.weights[q] *
                  heat_kernel(grid.points[pi], grid.points[q], eps, params);
        }
        worst_mass = std::max(worst_mass, std::fabs(mass - 1.0));
      }
    }
  }
  out.require(worst_mass < 1e-8, "mass defect " + fmt(worst_mass));
  out.note("mass " + fmt(worst_mass));

  // Semigroup property on the circle: smoothing for time eps1 and then
  // eps2 equals smoothing for eps1 + eps2.
  const double eps1 = 0.05, eps2 = 0.07;
  const SphereGrid grid = quadrature_nodes(1, 128);
  const std::size_t m = grid.size();
  SpectralParams params;
  params.dim_n = 1;
  params.truncation_K = truncation_level_heat(params, eps1);
  Eigen::MatrixXd P1(m, m), P2(m, m), P12(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = dot(grid.points[i], grid.points[j]);
      P1(i, j) = heat_kernel_cos(c, eps1, params);
      P2(i, j) = heat_kernel_cos(c, eps2, params);
      P12(i, j) = heat_kernel_cos(c, eps1 + eps2, params);
    }
  }
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid.weights.data(), m);
  const double semi_err =
      (P1 * w.asDiagonal() * P2 - P12).cwiseAbs().maxCoeff();
  out.require(semi_err < 1e-6, "semigroup error " + fmt(semi_err));
  out.note("semigroup " + fmt(semi_err));
  return out;
}

// ---------------------------------------------------------------------------
// 2. Regularization eigen-decay
// ---------------------------------------------------------------------------

Outcome criterion_regularize_decay() {
  Outcome out;
  auto grid = std::make_shared<SphereGrid>(quadrature_nodes(1, 256));
  const std::size_t m = grid->size();
  SpectralParams params;
  params.dim_n = 1;
  params.truncation_K = 64;

  double worst = 0.0;
  for (int k = 1; k <= 8; ++k) {
    FieldSample f;
    f.grid = grid;
    f.values.resize(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
      f.values(i, 0) = std::cos(k * std::atan2(grid->points[i].coords[1],
                                               grid->points[i].coords[0]));
    }
    for (double eps : {0.05, 0.1, 0.2}) {
      const FieldSample fr = regularize(f, eps, params);
      const double decay = std::exp(-0.5 * eps * double(k) * double(k));
      for (std::size_t i = 0; i < m; ++i) {
        worst = std::max(worst, std::fabs(fr.values(i, 0) - decay * f.values(i, 0)));
      }
    }
  }
  out.require(worst < 1e-7, "eigenfunction error " + fmt(worst));
  out.note("worst mode error " + fmt(worst));
  return out;
}

// ---------------------------------------------------------------------------
// 3. Smoothing-field law
// ---------------------------------------------------------------------------

Outcome criterion_field_law() {
  Outcome out;
  auto grid = std::make_shared<SphereGrid>(quadrature_nodes(1, 8));
  SpectralParams params;
  params.dim_n = 1;
  params.iota = 1.0;
  params.truncation_K = 64;

  // Empirical covariance of KL draws vs the truncated kernel, entrywise
  // within 5 standard errors of the product moments.
  const int N = 100000;
  Rng rng(5001);
  const std::vector<FieldSample> draws =
      sample_smoothing_field_kl(params, grid, 1, rng, N);
  const std::size_t m = grid->size();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd sumsq = Eigen::MatrixXd::Zero(m, m);
  for (const FieldSample& f : draws) {
    const Eigen::MatrixXd outer = f.values.col(0) * f.values.col(0).transpose();
    sum += outer;
    sumsq += outer.cwiseProduct(outer);
  }
  const Eigen::MatrixXd mean = sum / N;
  const KernelMatrix K = covariance_kernel_matrix(grid, params);
  int se_violations = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double var =
          (sumsq(i, j) - double(N) * mean(i, j) * mean(i, j)) / (N - 1);
      const double se = std::max(std::sqrt(std::max(var, 0.0) / N), 1e-300);
      const double ratio = std::fabs(mean(i, j) - K.entries(i, j)) / se;
      worst_ratio = std::max(worst_ratio, ratio);
      if (ratio > 5.0) ++se_violations;
    }
  }
  out.require(se_violations == 0,
              std::to_string(se_violations) + " entries beyond 5 std-err");
  out.note("worst covariance z " + fmt(worst_ratio));

  // Two-sample energy test: KL draws against Cholesky draws of the same
  // kernel must look like one law at the 1% level.
  Rng rng_kl(5002);
  Rng rng_ch(5003);
  Rng rng_perm(5004);
  const SampleBatch A =
      SampleBatch::from_draws(sample_smoothing_field_kl(params, grid, 1, rng_kl, 256));
  const SampleBatch B = SampleBatch::from_draws(cholesky_sample(K, 1, rng_ch, 256));
  const double p = energy_permutation_pvalue(A, B, rng_perm, 199);
  out.require(p >= 0.01, "energy test p " + fmt(p));
  out.note("energy p " + fmt(p));
  return out;
}

// ---------------------------------------------------------------------------
// 4. Wide-network recursion
// ---------------------------------------------------------------------------

Outcome criterion_network_recursion() {
  Outcome out;

  // Closed-form ReLU second moment vs direct quadrature.
  double worst_cf = 0.0;
  for (double v1 : {0.5, 1.0, 2.0}) {
    for (double v2 : {0.5, 1.3}) {
      for (double rho : {-0.95, -0.5, 0.0, 0.4, 0.9}) {
        worst_cf = std::max(worst_cf,
                            std::fabs(relu_bivariate_closed_form(v1, v2, rho) -
                                      relu_bivariate_quadrature(v1, v2, rho)));
      }
    }
  }
  out.require(worst_cf < 1e-9, "closed form vs quadrature " + fmt(worst_cf));
  out.note("closed form " + fmt(worst_cf));

  // Conditional covariance of a two-layer ReLU network vs the limiting
  // kernel: the max-entry error must shrink monotonically in the hidden
  // width and end within 5 standard errors.
  auto grid = std::make_shared<SphereGrid>(quadrature_nodes(1, 8));
  NetworkSpec spec;
  spec.widths = {2, 8, 1};
  spec.c_w = {1.0, 2.0};
  spec.c_b = {0.0, 0.1};
  spec.weight_laws = {WeightLawSpec{}, WeightLawSpec{}};
  spec.activation = Activation::relu;
  const Eigen::MatrixXd C = limiting_kernel_matrix(spec, grid).entries;

  std::vector<double> errs;
  double final_z = 0.0;
  for (int n1 : {8, 64, 512}) {
    spec.widths[1] = n1;
    Rng rng(derive_seed(6001, static_cast<unsigned long long>(n1)));
    const CovarianceEstimate est = empirical_network_covariance(spec, grid, rng, 10000);
    Eigen::Index bi = 0, bj = 0;
    const double err = (est.mean - C).cwiseAbs().maxCoeff(&bi, &bj);
    errs.push_back(err);
    if (n1 == 512) final_z = err / est.std_err(bi, bj);
  }
  out.require(errs[0] > errs[1] && errs[1] > errs[2],
              "width errors not monotone: " + fmt(errs[0]) + " " + fmt(errs[1]) +
                  " " + fmt(errs[2]));
  out.require(final_z < 5.0, "final width error z " + fmt(final_z));
  out.note("errors " + fmt(errs[0]) + " > " + fmt(errs[1]) + " > " + fmt(errs[2]) +
           ", final z " + fmt(final_z));
  return out;
}

// ---------------------------------------------------------------------------
// 5. Stein suite
// ---------------------------------------------------------------------------

Outcome criterion_stein_suite() {
  Outcome out;
  const std::vector<SteinCaseReport> reports = run_stein_suite(1);
  out.require(reports.size() == 20,
              "expected 20 cases, got " + std::to_string(reports.size()));

  int failed = 0;
  double worst_ratio = 0.0;
  for (const SteinCaseReport& r : reports) {
    if (!r.pass) ++failed;
    // Every check in the suite passes iff estimate <= bound * 1.05.
    worst_ratio = std::max(worst_ratio, r.estimate / r.bound);
    const bool residual = r.case_name.rfind("residual_", 0) == 0;
    const bool bump = r.case_name.find("bump") != std::string::npos;
    if (residual && !bump) {
      out.require(r.estimate < 1e-4, r.case_name + " residual " + fmt(r.estimate));
    }
    if (residual && bump) {
      out.require(r.estimate < 1e-2, r.case_name + " residual " + fmt(r.estimate));
    }
    if (r.case_name.rfind("hessian_bound_quadratic_", 0) == 0) {
      out.require(std::fabs(r.ratio - 0.5) <= 0.02,
                  r.case_name + " ratio " + fmt(r.ratio));
    }
  }
  out.require(failed == 0, std::to_string(failed) + " suite cases failed");
  out.require(worst_ratio <= 1.05, "worst estimate/bound " + fmt(worst_ratio));
  out.note("20 cases, worst estimate/bound " + fmt(worst_ratio));
  return out;
}

// ---------------------------------------------------------------------------
// 6. Convergence experiment
// ---------------------------------------------------------------------------

Outcome criterion_convergence() {
  Outcome out;
  const Config cfg = Config::from_file(STEINFIELD_CONFIG_DIR "/convergence.cfg");
  RunOptions opts;
  opts.out_dir = "acc_tmp/convergence";
  {
    SilenceCout quiet;
    out.require(run_experiment("convergence", cfg, opts) == 0, "nonzero exit");
  }

  // Per-repetition rows appear width-major in sweep order; collect the
  // values back into value[width][rep].
  const auto rows = read_csv("acc_tmp/convergence/results.csv");
  std::vector<long long> sweep;
  std::vector<std::vector<double>> value;
  double slope = 0.0;
  bool saw_slope = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 5) continue;
    if (row[1] == "max_marginal_w1") {
      const long long n1 = std::stoll(row[0]);
      if (sweep.empty() || sweep.back() != n1) {
        sweep.push_back(n1);
        value.emplace_back();
      }
      value.back().push_back(std::stod(row[2]));
    } else if (row[1] == "log_log_slope") {
      slope = std::stod(row[2]);
      saw_slope = true;
    }
  }
  out.require(sweep.size() == 4 && !value.empty(), "unexpected results.csv shape");
  const std::size_t reps = value.empty() ? 0 : value[0].size();
  int decreasing = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    bool strict = true;
    for (std::size_t s = 1; s < value.size(); ++s) {
      strict = strict && value[s][rep] < value[s - 1][rep];
    }
    decreasing += strict ? 1 : 0;
  }
  out.require(decreasing >= 2, "strict decrease in only " + std::to_string(decreasing) +
                                   " of " + std::to_string(reps) + " reps");
  out.require(saw_slope && slope >= -0.65 && slope <= -0.35,
              "log-log slope " + fmt(slope));
  out.note("strict decrease " + std::to_string(decreasing) + "/" +
           std::to_string(reps) + ", slope " + fmt(slope));
  return out;
}

// ---------------------------------------------------------------------------
// 7. Chaining-check experiment
// ---------------------------------------------------------------------------

Outcome criterion_chaining() {
  Outcome out;
  const Config cfg = Config::from_file(STEINFIELD_CONFIG_DIR "/chaining-check.cfg");
  RunOptions opts;
  opts.out_dir = "acc_tmp/chaining";
  {
    SilenceCout quiet;
    out.require(run_experiment("chaining-check", cfg, opts) == 0,
                "tail bound violated (nonzero exit)");
  }

  const auto rows = read_csv("acc_tmp/chaining/tails.csv");
  out.require(rows.size() == 26, "expected 25 lattice rows");
  int passing = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 5 && rows[r][4] == "true") ++passing;
  }
  out.require(passing == 25, std::to_string(passing) + "/25 lattice points pass");
  out.note("25/25 lattice points below the bound");
  return out;
}

// ---------------------------------------------------------------------------
// 8. Bound evaluators
// ---------------------------------------------------------------------------

Outcome criterion_bound_evaluators() {
  Outcome out;

  const double expo = width_exponent(1, 1e9, 1e-9);
  out.require(std::fabs(expo - 1.0 / 14.0) < 1e-6, "width exponent " + fmt(expo));

  const std::vector<int> widths_beta = {2, 10000, 1};
  const std::vector<double> ones = {1.0};
  const double beta = beta_coefficient(widths_beta, ones);
  out.require(std::fabs(beta - 0.01) <= 1e-12 * 0.01, "beta " + fmt(beta));

  const double smooth = smooth_metric_w1_bound(widths_beta, ones, 1, 1e9, 1e-9, 1.0);
  const double smooth_ref = 1.5718950800276258218;
  out.require(std::fabs(smooth - smooth_ref) <= 1e-12 * smooth_ref,
              "smooth-metric bound " + fmt(smooth));

  const std::vector<int> widths_seq = {2, 1000000, 1};
  const double seq = sequential_width_bound(widths_seq, ones, 1.0, 1, 1e9, 1e-9, 1.0);
  const double seq_ref = 41.198888365513880276;
  out.require(std::fabs(seq - seq_ref) <= 1e-12 * seq_ref,
              "sequential width bound " + fmt(seq));

  // Regime-violation errors must fire on the documented inputs.
  auto fires = [](const std::function<void()>& f, const std::string& phrase) {
    try {
      f();
    } catch (const RegimeError& e) {
      return std::string(e.what()).find(phrase) != std::string::npos;
    } catch (...) {
      return false;
    }
    return false;
  };
  out.require(fires([] { width_exponent(2, 2.0, 1.0); }, ""),
              "p <= n did not raise");
  out.require(fires([&] { sequential_width_bound({2, 10, 2}, ones, 1.0, 1, 1e9,
                                                 1e-9, 1.0); },
                    "sequential-limit condition violated"),
              "sequential-limit violation did not raise");
  out.require(fires([&] { smooth_metric_w1_bound({2, 4, 2}, ones, 1, 1e9, 1e-9,
                                                 1.0); },
                    "bound regime violated"),
              "bound-regime violation did not raise");
  ChainingParams bad;
  bad.alpha = 2.0;
  bad.beta = 4.0;
  bad.gamma = 4.0;
  out.require(fires([&] { chaining_tail_bound(bad, 0.1, 1.0, 1.0); },
                    "chaining hypothesis violated"),
              "chaining violation did not raise");
  out.require(fires([] { regularization_error_bound(1.0, 1, 1, 2.0, 1.5); }, ""),
              "out-of-range smoothing time did not raise");
  out.require(fires([] { optimal_eps_delta(1, 1e9, 1e-9, 2.0); }, ""),
              "ratio >= 1 did not raise");

  out.note("anchors 1/14, 0.01, 1.5719, 41.199; all regime errors fire");
  return out;
}

// ---------------------------------------------------------------------------
// 9. Determinism of CLI output
// ---------------------------------------------------------------------------

Outcome criterion_determinism() {
  Outcome out;
  struct Job {
    std::string experiment, config, csv;
  };
  const std::vector<Job> jobs = {
      {"kernel", "kernel.cfg", "kernel.csv"},
      {"sample", "sample.cfg", "samples.csv"},
      {"bounds", "bounds.cfg", "bounds.csv"},
  };
  for (const Job& job : jobs) {
    const std::string base = "acc_tmp/det_" + job.experiment;
    const std::string args = job.experiment + " --config \"" STEINFIELD_CONFIG_DIR
                             "/" + job.config + "\" --out ";
    out.require(run_cli(args + base + "_1") == 0, job.experiment + " run 1 failed");
    out.require(run_cli(args + base + "_2") == 0, job.experiment + " run 2 failed");
    const std::string a = slurp(base + "_1/" + job.csv);
    const std::string b = slurp(base + "_2/" + job.csv);
    out.require(!a.empty(), job.experiment + " wrote no CSV");
    out.require(a == b, job.experiment + " CSV differs across re-runs");
  }
  out.note("kernel, sample, bounds re-runs byte-identical");
  return out;
}

struct Criterion {
  int id;
  std::string label;
  double budget_seconds;
  std::function<Outcome()> body;
};

}  // namespace

int main() {
  std::filesystem::create_directories("acc_tmp");
  const std::vector<Criterion> criteria = {
      {1, "spectral identities", 30.0, criterion_spectral_identities},
      {2, "regularization eigen-decay", 5.0, criterion_regularize_decay},
      {3, "smoothing-field law", 120.0, criterion_field_law},
      {4, "wide-network recursion", 300.0, criterion_network_recursion},
      {5, "Stein suite", 600.0, criterion_stein_suite},
      {6, "convergence experiment", 900.0, criterion_convergence},
      {7, "chaining tail bound", 300.0, criterion_chaining},
      {8, "bound evaluators", 1.0, criterion_bound_evaluators},
      {9, "CLI determinism", 120.0, criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed >= c.budget_seconds) {
      out.pass = false;
      out.detail += (out.detail.empty() ? "" : "; ") + std::string("over ") +
                    fmt(c.budget_seconds) + "s budget";
    }
    failures += out.pass ? 0 : 1;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << c.id << "  "
              << c.label << "  (" << fmt(elapsed) << " s)  " << out.detail << "\n"
              << std::flush;
  }
  std::cout << (failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << " ("
            << (9 - failures) << "/9)\n";
  return failures == 0 ? 0 : 1;
}
