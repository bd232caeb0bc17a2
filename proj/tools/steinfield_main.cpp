#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "steinfield/config.hpp"
#include "steinfield/errors.hpp"
#include "steinfield/experiments.hpp"
#include "steinfield/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "steinfield: spectral Gaussian fields on spheres, wide-network limits, "
      "and Stein-equation verification experiments"};
  app.set_version_flag("--version", steinfield::kVersionString);

  std::string experiment;
  std::string config_path;
  std::string out_dir;
  unsigned long long seed = 0;
  int threads = 0;

  app.add_option("experiment", experiment,
                 "one of: kernel, sample, convergence, bounds, stein-check, "
                 "chaining-check, regularize-check")
      ->required();
  app.add_option("--config", config_path, "configuration file (.cfg text or .json)")
      ->required();
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "master seed (overrides seeds.master)");
  CLI::Option* out_opt =
      app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", threads,
                 "worker threads (overrides STEINFIELD_THREADS; default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad arguments are configuration errors
  }

  try {
    steinfield::Config cfg = steinfield::Config::from_file(config_path);
    steinfield::RunOptions opts;
    if (seed_opt->count() > 0) opts.seed = seed;
    if (out_opt->count() > 0) opts.out_dir = out_dir;
    opts.threads = threads;
    return steinfield::run_experiment(experiment, cfg, opts);
  } catch (const steinfield::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const steinfield::RegimeError& e) {
    std::cerr << "regime violation: " << e.what() << "\n";
    return 3;
  } catch (const steinfield::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
