#include "steinfield/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <vector>

#include <json.hpp>

#include "steinfield/bounds.hpp"
#include "steinfield/csv.hpp"
#include "steinfield/errors.hpp"
#include "steinfield/field_ops.hpp"
#include "steinfield/gaussian.hpp"
#include "steinfield/metrics.hpp"
#include "steinfield/nngp.hpp"
#include "steinfield/parallel.hpp"
#include "steinfield/rng.hpp"
#include "steinfield/simd.hpp"
#include "steinfield/spectral.hpp"
#include "steinfield/sphere.hpp"
#include "steinfield/stein.hpp"
#include "steinfield/version.hpp"

namespace steinfield {

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

double wall_seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string resolve_out_dir(const Config& cfg, const RunOptions& opts,
                            const std::string& experiment) {
  std::string dir = opts.out_dir ? *opts.out_dir
                                 : cfg.get_string("output.dir", "out/" + experiment);
  std::filesystem::create_directories(dir);
  return dir;
}

unsigned long long resolve_seed(const Config& cfg, const RunOptions& opts) {
  if (opts.seed) return *opts.seed;
  return static_cast<unsigned long long>(cfg.get_int("seeds.master", 1));
}

std::shared_ptr<const SphereGrid> grid_from_config(const Config& cfg,
                                                   unsigned long long seed) {
  const std::string kind = cfg.get_string("grid.kind", "equiangular");
  if (kind == "equiangular") {
    return std::make_shared<SphereGrid>(
        quadrature_nodes(1, static_cast<int>(cfg.get_int("grid.size", 16))));
  }
  if (kind == "product") {
    return std::make_shared<SphereGrid>(
        quadrature_nodes(2, static_cast<int>(cfg.get_int("grid.level", 8))));
  }
  if (kind == "fibonacci") {
    return std::make_shared<SphereGrid>(
        fibonacci_grid(static_cast<int>(cfg.get_int("grid.size", 64))));
  }
  if (kind == "uniform") {
    Rng rng(derive_seed(seed, 0x9d1du));
    return std::make_shared<SphereGrid>(
        uniform_grid(rng, static_cast<int>(cfg.get_int("grid.n", 1)),
                     static_cast<int>(cfg.get_int("grid.size", 64))));
  }
  throw ConfigError(cfg.name() + ": key 'grid.kind' must be one of "
                    "equiangular/product/fibonacci/uniform, got '" + kind + "'");
}

SpectralParams spectral_from_config(const Config& cfg, int dim_n) {
  SpectralParams p;
  p.dim_n = static_cast<int>(cfg.get_int("spectral.n", dim_n));
  p.iota = cfg.get_double("spectral.iota", 1.0);
  p.truncation_K = static_cast<int>(cfg.get_int("spectral.k", 64));
  p.include_constant_mode = cfg.get_bool("spectral.include_constant", true);
  p.validate();
  // spectral.tol picks the truncation level from the covariance tail
  // majorant instead of a fixed spectral.k (NumericalError when the
  // required level exceeds spectral.max_k).
  if (cfg.has("spectral.tol")) {
    const double tol = cfg.get_double("spectral.tol");
    const long long cap = cfg.get_int("spectral.max_k", 1000000);
    p.truncation_K = truncation_level_covariance(p, tol, cap);
  }
  return p;
}

NetworkSpec network_from_config(const Config& cfg) {
  NetworkSpec spec;
  for (long long w : cfg.get_int_list("network.widths")) {
    spec.widths.push_back(static_cast<int>(w));
  }
  const int L = static_cast<int>(spec.widths.size()) - 1;
  if (L < 1) throw ConfigError(cfg.name() + ": key 'network.widths' needs >= 2 entries");

  auto expand = [&](const std::string& key, double fallback) {
    std::vector<double> v = cfg.has(key) ? cfg.get_double_list(key)
                                         : std::vector<double>{fallback};
    if (v.size() == 1) v.assign(L, v[0]);
    if (static_cast<int>(v.size()) != L) {
      throw ConfigError(cfg.name() + ": key '" + key + "' needs 1 or " +
                        std::to_string(L) + " entries");
    }
    return v;
  };
  spec.c_w = expand("network.c_w", 1.0);
  spec.c_b = expand("network.c_b", 0.0);

  std::vector<std::string> laws = cfg.has("network.weight_law")
                                      ? cfg.get_string_list("network.weight_law")
                                      : std::vector<std::string>{"gaussian"};
  if (laws.size() == 1) laws.assign(L, laws[0]);
  if (static_cast<int>(laws.size()) != L) {
    throw ConfigError(cfg.name() + ": key 'network.weight_law' needs 1 or " +
                      std::to_string(L) + " entries");
  }
  for (const std::string& l : laws) spec.weight_laws.push_back(WeightLawSpec::parse(l));

  spec.activation = parse_activation(cfg.get_string("network.activation", "relu"));
  spec.lip_constant = cfg.get_double("network.lip", 1.0);
  spec.validate();
  return spec;
}

void write_metadata(const std::string& dir, const std::string& experiment,
                    const Config& cfg, unsigned long long seed, int threads,
                    double wall_seconds) {
  nlohmann::ordered_json meta;
  meta["experiment"] = experiment;
  meta["version"] = kVersionString;
  meta["seed"] = seed;
  meta["threads"] = threads;
  meta["rng"] = "xoshiro256++ with splitmix64 seeding and hash stream splitting";
  meta["simd"] = simd::isa_name();
  meta["wall_time_seconds"] = wall_seconds;
  nlohmann::ordered_json echo;
  for (const std::string& key : cfg.keys()) echo[key] = cfg.get_string(key);
  meta["config"] = echo;
  std::ofstream out(dir + "/metadata.json", std::ios::binary);
  out << meta.dump(2) << "\n";
}

double grid_angle(const SphereGrid& grid, std::size_t i) {
  const Eigen::VectorXd& c = grid.points[i].coords;
  double a = std::atan2(c[1], c[0]);
  if (a < 0.0) a += 2.0 * 3.14159265358979323846;
  return a;
}

// ---------------------------------------------------------------------------
// kernel: evaluate a kernel matrix on a grid
// ---------------------------------------------------------------------------

int run_kernel(const Config& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned long long seed = resolve_seed(cfg, opts);
  const std::string dir = resolve_out_dir(cfg, opts, "kernel");
  auto grid = grid_from_config(cfg, seed);
  const SpectralParams params = spectral_from_config(cfg, grid->dim_n);

  const std::string type = cfg.get_string("kernel.type", "covariance");
  KernelMatrix K;
  if (type == "covariance") {
    K = covariance_kernel_matrix(grid, params);
  } else if (type == "heat") {
    const double eps = cfg.get_double("kernel.eps", 0.1);
    K = kernel_matrix_from(grid, [&](const SpherePoint& x, const SpherePoint& y) {
      return heat_kernel(x, y, eps, params);
    });
  } else {
    throw ConfigError(cfg.name() +
                      ": key 'kernel.type' must be covariance or heat, got '" +
                      type + "'");
  }

  write_grid_csv(*grid, dir + "/grid.csv");
  CsvWriter csv(dir + "/kernel.csv");
  csv.row({"i", "j", "value"});
  for (Eigen::Index i = 0; i < K.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < K.entries.cols(); ++j) {
      csv.row({std::to_string(i), std::to_string(j), format_full(K.entries(i, j))});
    }
  }
  csv.close();

  write_metadata(dir, "kernel", cfg, seed, resolve_threads(opts.threads),
                 wall_seconds_since(t0));
  std::cout << "kernel: wrote " << K.entries.rows() << "x" << K.entries.cols()
            << " " << type << " matrix to " << dir << "/kernel.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sample: draw fields with one of the four samplers
// ---------------------------------------------------------------------------

int run_sample(const Config& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned long long seed = resolve_seed(cfg, opts);
  const std::string dir = resolve_out_dir(cfg, opts, "sample");
  auto grid = grid_from_config(cfg, seed);
  const int draws = static_cast<int>(cfg.get_int("mc.draws", 100));
  const std::string sampler = cfg.get_string("sampler", "cholesky");
  Rng rng(derive_seed(seed, 0x5a3fu));

  std::vector<FieldSample> fields;
  if (sampler == "kl") {
    const SpectralParams params = spectral_from_config(cfg, grid->dim_n);
    const int d = static_cast<int>(cfg.get_int("field.d", 1));
    fields = sample_smoothing_field_kl(params, grid, d, rng, draws);
  } else if (sampler == "cholesky") {
    const SpectralParams params = spectral_from_config(cfg, grid->dim_n);
    const int d = static_cast<int>(cfg.get_int("field.d", 1));
    fields = cholesky_sample(covariance_kernel_matrix(grid, params), d, rng, draws);
  } else if (sampler == "network") {
    const NetworkSpec spec = network_from_config(cfg);
    fields.reserve(draws);
    for (int r = 0; r < draws; ++r) {
      fields.push_back(sample_network_field(spec, grid, rng));
    }
  } else if (sampler == "limit") {
    const NetworkSpec spec = network_from_config(cfg);
    fields = sample_limit_field(spec, grid, rng, draws);
  } else {
    throw ConfigError(cfg.name() + ": key 'sampler' must be one of "
                      "kl/cholesky/network/limit, got '" + sampler + "'");
  }

  write_grid_csv(*grid, dir + "/grid.csv");
  write_samples_csv(fields, dir + "/samples.csv");
  write_metadata(dir, "sample", cfg, seed, resolve_threads(opts.threads),
                 wall_seconds_since(t0));
  std::cout << "sample: wrote " << fields.size() << " draws (" << sampler
            << " sampler) to " << dir << "/samples.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// convergence: width sweep of the network field against its Gaussian limit
// ---------------------------------------------------------------------------

int run_convergence(const Config& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned long long seed = resolve_seed(cfg, opts);
  const std::string dir = resolve_out_dir(cfg, opts, "convergence");
  const int threads = resolve_threads(opts.threads);

  auto grid = grid_from_config(cfg, seed);
  const std::vector<long long> sweep = cfg.has("sweep.n1")
                                           ? cfg.get_int_list("sweep.n1")
                                           : std::vector<long long>{8, 64, 512, 4096};
  const int reps = static_cast<int>(cfg.get_int("seeds.reps", 3));
  const int draws = static_cast<int>(cfg.get_int("mc.draws", 10000));
  const int gauss_draws = static_cast<int>(cfg.get_int("mc.gaussian_draws", draws));
  const std::string metric = cfg.get_string("metric.name", "max_marginal_w1");
  if (reps < 1 || sweep.empty()) {
    throw ConfigError(cfg.name() + ": convergence needs seeds.reps >= 1 and a "
                      "nonempty sweep.n1");
  }
  if (gauss_draws % 2 != 0) {
    throw ConfigError(cfg.name() + ": mc.gaussian_draws must be even "
                      "(antithetic pairing)");
  }

  NetworkSpec base = network_from_config(cfg);
  if (base.widths.size() != 3) {
    throw ConfigError(cfg.name() + ": the convergence sweep expects "
                      "network.widths = [n0, n1, n2]; the middle entry is "
                      "replaced by each sweep value");
  }

  const std::size_t S = sweep.size();
  std::vector<std::vector<double>> value(S, std::vector<double>(reps, 0.0));
  std::vector<std::vector<unsigned long long>> rep_seed(
      S, std::vector<unsigned long long>(reps, 0));

  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
    // The Gaussian reference batch is drawn once per repetition and
    // shared across widths: the limit covariance does not depend on n1,
    // and the shared draw removes its MC noise from the width contrast.
    NetworkSpec spec = base;
    Rng rng_g(derive_seed(seed, 0x6a55u, rep));
    const KernelMatrix KG = limiting_kernel_matrix(spec, grid);
    std::vector<FieldSample> gdraws =
        cholesky_sample(KG, spec.widths.back(), rng_g, gauss_draws, true);
    const SampleBatch B = SampleBatch::from_draws(gdraws);
    gdraws.clear();

    for (std::size_t s = 0; s < S; ++s) {
      spec.widths[1] = static_cast<int>(sweep[s]);
      spec.validate();
      const unsigned long long fs = derive_seed(seed, s + 1, rep, 0x1);
      Rng rng(fs);
      std::vector<FieldSample> fdraws;
      fdraws.reserve(draws);
      for (int i = 0; i < draws; ++i) {
        fdraws.push_back(sample_network_field(spec, grid, rng));
      }
      const SampleBatch A = SampleBatch::from_draws(fdraws);
      fdraws.clear();

      double v = 0.0;
      if (metric == "max_marginal_w1") {
        v = max_marginal_w1(A, B);
      } else if (metric == "sliced_w1") {
        Rng dir_rng(derive_seed(seed, 0x511ce, rep, s));
        v = sliced_w1(A, B, dir_rng,
                      static_cast<int>(cfg.get_int("metric.directions", 32)));
      } else if (metric == "energy_distance") {
        v = energy_distance(A, B);
      } else {
        throw ConfigError(cfg.name() + ": key 'metric.name' must be one of "
                          "max_marginal_w1/sliced_w1/energy_distance, got '" +
                          metric + "'");
      }
      value[s][rep] = v;
      rep_seed[s][rep] = fs;
    }
  });

  // Per-repetition rows, then mean rows, then the fitted log-log slope.
  CsvWriter csv(dir + "/results.csv");
  csv.row({"n1", "metric_name", "value", "std_err", "seed"});
  for (std::size_t s = 0; s < S; ++s) {
    for (int rep = 0; rep < reps; ++rep) {
      csv.row({std::to_string(sweep[s]), metric, format_full(value[s][rep]),
               format_full(0.0), std::to_string(rep_seed[s][rep])});
    }
  }
  std::vector<double> mean(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    double m = 0.0;
    for (double v : value[s]) m += v;
    m /= reps;
    double var = 0.0;
    for (double v : value[s]) var += (v - m) * (v - m);
    const double std_err = reps > 1 ? std::sqrt(var / (reps - 1) / reps) : 0.0;
    mean[s] = m;
    csv.row({std::to_string(sweep[s]), metric + "_mean", format_full(m),
             format_full(std_err), std::to_string(seed)});
  }
  double slope = 0.0;
  if (S >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const double x = std::log(double(sweep[s]));
      const double y = std::log(std::max(mean[s], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = double(S);
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  csv.row({"0", "log_log_slope", format_full(slope), format_full(0.0),
           std::to_string(seed)});
  csv.close();

  write_metadata(dir, "convergence", cfg, seed, threads, wall_seconds_since(t0));
  std::cout << "convergence: " << metric << " over n1 = {";
  for (std::size_t s = 0; s < S; ++s) std::cout << (s ? "," : "") << sweep[s];
  std::cout << "}, fitted log-log slope " << slope << "; wrote " << dir
            << "/results.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bounds: JSON report of every closed-form evaluator
// ---------------------------------------------------------------------------

int run_bounds(const Config& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned long long seed = resolve_seed(cfg, opts);
  const std::string dir = resolve_out_dir(cfg, opts, "bounds");

  BoundParams bp;
  bp.n = static_cast<int>(cfg.get_int("bounds.n", 1));
  bp.d = static_cast<int>(cfg.get_int("bounds.d", 1));
  bp.iota = cfg.get_double("bounds.iota", 1e-9);
  bp.p = cfg.get_double("bounds.p", 1e9);
  bp.eps = cfg.get_double("bounds.eps", 0.5);
  bp.delta = cfg.get_double("bounds.delta", 0.5);
  bp.constant_c = cfg.get_double("bounds.c", 1.0);

  std::vector<int> widths;
  if (cfg.has("network.widths")) {
    for (long long w : cfg.get_int_list("network.widths")) {
      widths.push_back(static_cast<int>(w));
    }
  } else {
    widths = {2, 1000000, 1};
  }
  const std::size_t L = widths.size() - 1;
  std::vector<double> opnorm(L - 1, 1.0);
  std::vector<double> opnorm3(L - 1, 1.0);
  if (cfg.has("bounds.opnorm")) opnorm = cfg.get_double_list("bounds.opnorm");
  if (cfg.has("bounds.opnorm3")) opnorm3 = cfg.get_double_list("bounds.opnorm3");
  const double lip = cfg.get_double("bounds.lip", 1.0);
  const double dF = cfg.get_double("bounds.dF", 1e-3);
  const double modF = cfg.get_double("bounds.modF", 0.0);
  const double modH = cfg.get_double("bounds.modH", 0.0);
  const double ratio = cfg.get_double("bounds.ratio",
                                      std::pow(double(widths[L]), 4.0) / widths[L - 1]);

  ChainingParams cp;
  cp.alpha = cfg.get_double("chaining.alpha", 1.0);
  cp.beta = cfg.get_double("chaining.beta", 4.0);
  cp.gamma = cfg.get_double("chaining.gamma", 4.0);
  cp.c0 = cfg.get_double("chaining.c0", 1.0);
  cp.c1 = cfg.get_double("chaining.c1", 1.0);

  nlohmann::ordered_json report;
  report["width_exponent"] = width_exponent(bp.n, bp.p, bp.iota);
  report["width_exponent_alternate"] =
      width_exponent(bp.n, bp.p, bp.iota, WidthExponentForm::alternate);
  report["master_bound"] = master_bound(dF, modF, modH, bp);
  report["sequential_width_bound"] =
      sequential_width_bound(widths, opnorm, lip, bp.n, bp.p, bp.iota, bp.constant_c);
  report["beta_coefficient"] = beta_coefficient(widths, opnorm3);
  report["smooth_metric_w1_bound"] =
      smooth_metric_w1_bound(widths, opnorm3, bp.n, bp.p, bp.iota, bp.constant_c);
  report["smooth_metric_layer_bound"] = smooth_metric_layer_bound(
      cfg.get_double("layer.c_w", 1.0), cfg.get_double("layer.B", 1.0),
      cfg.get_double("layer.third_moment", 1.0),
      static_cast<int>(cfg.get_int("layer.n_out", 4)),
      static_cast<int>(cfg.get_int("layer.n_in", 1024)));
  report["regularization_error_bound"] = regularization_error_bound(
      bp.constant_c, bp.d, bp.n, bp.p, cfg.get_double("bounds.reg_eps", 0.01));
  const EpsDelta pair = optimal_eps_delta(bp.n, bp.p, bp.iota, ratio);
  report["optimal_eps"] = pair.eps;
  report["optimal_delta"] = pair.delta;
  report["chaining_tail_bound"] =
      chaining_tail_bound(cp, cfg.get_double("chaining.theta", 0.1),
                          cfg.get_double("chaining.lambda", 1.0),
                          cfg.get_double("chaining.c", 1.0));
  report["chaining_moment_bound"] =
      chaining_moment_bound(cp, cfg.get_double("chaining.theta", 0.1),
                            cfg.get_double("chaining.k", 1.0), bp.d,
                            cfg.get_double("chaining.c", 1.0));

  std::ofstream jout(dir + "/bounds.json", std::ios::binary);
  jout << report.dump(2) << "\n";
  jout.close();

  CsvWriter csv(dir + "/bounds.csv");
  csv.row({"name", "value"});
  for (auto it = report.begin(); it != report.end(); ++it) {
    csv.row({it.key(), format_full(it.value().get<double>())});
  }
  csv.close();

  std::cout << report.dump(2) << "\n";
  write_metadata(dir, "bounds", cfg, seed, resolve_threads(opts.threads),
                 wall_seconds_since(t0));
  return 0;
}

// ---------------------------------------------------------------------------
// stein-check: the 20-case verification suite
// ---------------------------------------------------------------------------

int run_stein_check(const Config& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned long long seed = resolve_seed(cfg, opts);
  const std::string dir = resolve_out_dir(cfg, opts, "stein-check");

  const std::vector<SteinCaseReport> reports = run_stein_suite(seed);

  nlohmann::ordered_json jreport = nlohmann::ordered_json::array();
  CsvWriter csv(dir + "/report.csv");
  csv.row({"case", "bound", "estimate", "ratio", "pass"});
  bool all_pass = true;
  for (const SteinCaseReport& r : reports) {
    nlohmann::ordered_json jcase;
    jcase["case"] = r.case_name;
    jcase["bound"] = r.bound;
    jcase["estimate"] = r.estimate;
    jcase["ratio"] = r.ratio;
    jcase["pass"] = r.pass;
    jreport.push_back(jcase);
    csv.row({r.case_name, format_full(r.bound), format_full(r.estimate),
             format_full(r.ratio), r.pass ? "true" : "false"});
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.case_name
              << "  estimate=" << r.estimate << "  bound=" << r.bound
              << "  ratio=" << r.ratio << "\n";
  }
  csv.close();
  std::ofstream jout(dir + "/stein_report.json", std::ios::binary);
  jout << jreport.dump(2) << "\n";
  jout.close();

  write_metadata(dir, "stein-check", cfg, seed, resolve_threads(opts.threads),
                 wall_seconds_since(t0));
  std::cout << (all_pass ? "stein-check: all " : "stein-check: FAILED, not all ")
            << reports.size() << " cases passed\n";
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// chaining-check: empirical modulus tails against the chaining bound
// ---------------------------------------------------------------------------

int run_chaining_check(const Config& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned long long seed = resolve_seed(cfg, opts);
  const std::string dir = resolve_out_dir(cfg, opts, "chaining-check");

  auto grid = grid_from_config(cfg, seed);
  SpectralParams params = spectral_from_config(cfg, grid->dim_n);
  const int draws = static_cast<int>(cfg.get_int("mc.draws", 10000));

  ChainingParams cp;
  cp.alpha = cfg.get_double("chaining.alpha", 1.0);
  cp.beta = cfg.get_double("chaining.beta", 4.0);
  cp.gamma = cfg.get_double("chaining.gamma", 4.0);
  const double c_fit = cfg.get_double("chaining.c", 1.0);
  const std::vector<double> thetas =
      cfg.has("chaining.theta")
          ? cfg.get_double_list("chaining.theta")
          : std::vector<double>{0.15, 0.3, 0.6, 1.2, 2.4};
  const std::vector<double> lambdas =
      cfg.has("chaining.lambda")
          ? cfg.get_double_list("chaining.lambda")
          : std::vector<double>{0.5, 0.75, 1.0, 1.5, 2.0};
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (thetas[i] <= thetas[i - 1]) {
      throw ConfigError(cfg.name() + ": chaining.theta must be strictly increasing");
    }
  }

  // Pairwise geodesic distances, sorted once; the modulus at every theta
  // is then a prefix maximum over the sorted increment list.
  const std::size_t m = grid->size();
  struct Pair {
    double dist;
    int i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      pairs.push_back(Pair{geodesic_distance(grid->points[i], grid->points[j]),
                           static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
  std::vector<std::size_t> cut(thetas.size());
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    std::size_t c = 0;
    while (c < pairs.size() && pairs[c].dist < thetas[t]) ++c;
    cut[t] = c;
  }

  Rng rng(derive_seed(seed, 0xc4a1u));
  const KernelMatrix K = covariance_kernel_matrix(grid, params);
  const std::vector<FieldSample> fields = cholesky_sample(K, 1, rng, draws);

  std::vector<std::vector<int>> exceed(thetas.size(),
                                       std::vector<int>(lambdas.size(), 0));
  for (const FieldSample& f : fields) {
    const Eigen::VectorXd v = f.values.col(0);
    double running = 0.0;
    std::size_t p = 0;
    for (std::size_t t = 0; t < thetas.size(); ++t) {
      for (; p < cut[t]; ++p) {
        running = std::max(running, std::fabs(v[pairs[p].i] - v[pairs[p].j]));
      }
      for (std::size_t l = 0; l < lambdas.size(); ++l) {
        if (running > lambdas[l]) ++exceed[t][l];
      }
    }
  }

  CsvWriter csv(dir + "/tails.csv");
  csv.row({"theta", "lambda", "empirical", "bound", "pass"});
  bool all_pass = true;
  int violations = 0;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      const double empirical = double(exceed[t][l]) / draws;
      const double bound = chaining_tail_bound(cp, thetas[t], lambdas[l], c_fit);
      const bool pass = empirical <= bound;
      all_pass = all_pass && pass;
      violations += pass ? 0 : 1;
      csv.row({format_full(thetas[t]), format_full(lambdas[l]),
               format_full(empirical), format_full(bound), pass ? "true" : "false"});
    }
  }
  csv.close();

  write_metadata(dir, "chaining-check", cfg, seed, resolve_threads(opts.threads),
                 wall_seconds_since(t0));
  std::cout << "chaining-check: " << (all_pass ? "all " : "FAILED, violations at ")
            << (all_pass ? std::to_string(thetas.size() * lambdas.size())
                         : std::to_string(violations))
            << " lattice points " << (all_pass ? "below the bound" : "")
            << "; wrote " << dir << "/tails.csv\n";
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// regularize-check: heat smoothing must scale cos(k theta) by e^{-eps k^2/2}
// ---------------------------------------------------------------------------

int run_regularize_check(const Config& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned long long seed = resolve_seed(cfg, opts);
  const std::string dir = resolve_out_dir(cfg, opts, "regularize-check");

  const int grid_size = static_cast<int>(cfg.get_int("grid.size", 256));
  auto grid = std::make_shared<SphereGrid>(quadrature_nodes(1, grid_size));
  SpectralParams params = spectral_from_config(cfg, 1);
  const int k_max = static_cast<int>(cfg.get_int("regularize.k_max", 8));
  const std::vector<double> eps_list =
      cfg.has("regularize.eps") ? cfg.get_double_list("regularize.eps")
                                : std::vector<double>{0.05, 0.1, 0.2};
  const double tol = cfg.get_double("regularize.tol", 1e-7);

  const std::size_t m = grid->size();
  std::vector<double> angles(m);
  for (std::size_t i = 0; i < m; ++i) angles[i] = grid_angle(*grid, i);

  CsvWriter csv(dir + "/decay.csv");
  csv.row({"k", "eps", "max_error", "pass"});
  bool all_pass = true;
  double worst = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    FieldSample f;
    f.grid = grid;
    f.values.resize(m, 1);
    for (std::size_t i = 0; i < m; ++i) f.values(i, 0) = std::cos(k * angles[i]);
    for (double eps : eps_list) {
      const FieldSample fr = regularize(f, eps, params);
      const double decay = std::exp(-0.5 * eps * double(k) * double(k));
      double err = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        err = std::max(err, std::fabs(fr.values(i, 0) - decay * f.values(i, 0)));
      }
      const bool pass = err < tol;
      all_pass = all_pass && pass;
      worst = std::max(worst, err);
      csv.row({std::to_string(k), format_full(eps), format_full(err),
               pass ? "true" : "false"});
    }
  }
  csv.close();

  write_metadata(dir, "regularize-check", cfg, seed, resolve_threads(opts.threads),
                 wall_seconds_since(t0));
  std::cout << "regularize-check: " << (all_pass ? "PASS" : "FAIL")
            << ", worst eigenfunction error " << worst << " (tolerance " << tol
            << "); wrote " << dir << "/decay.csv\n";
  return all_pass ? 0 : 1;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "kernel",      "sample",         "convergence",     "bounds",
      "stein-check", "chaining-check", "regularize-check"};
  return names;
}

int run_experiment(const std::string& experiment, const Config& cfg,
                   const RunOptions& opts) {
  if (experiment == "kernel") return run_kernel(cfg, opts);
  if (experiment == "sample") return run_sample(cfg, opts);
  if (experiment == "convergence") return run_convergence(cfg, opts);
  if (experiment == "bounds") return run_bounds(cfg, opts);
  if (experiment == "stein-check") return run_stein_check(cfg, opts);
  if (experiment == "chaining-check") return run_chaining_check(cfg, opts);
  if (experiment == "regularize-check") return run_regularize_check(cfg, opts);
  throw ConfigError("unknown experiment '" + experiment + "'; expected one of "
                    "kernel/sample/convergence/bounds/stein-check/"
                    "chaining-check/regularize-check");
}

}  // namespace steinfield
