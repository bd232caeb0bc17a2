#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steinfield/config.hpp"

// =============================================================================
// Experiment runner.
//
// Seven seeded experiments tie the modules together:
//   kernel           evaluate a covariance or heat kernel on a grid
//   sample           draw fields (KL / Cholesky / network / limit samplers)
//   convergence      width sweep of a network field against its Gaussian
//                    limit under a marginal W1 metric, with fitted slope
//   bounds           JSON report of every closed-form bound evaluator
//   stein-check      the 20-case Stein verification suite
//   chaining-check   empirical modulus-of-continuity tails vs the
//                    chaining tail bound on a (theta, lambda) lattice
//   regularize-check eigenfunction decay of heat-kernel smoothing on S^1
//
// Every experiment is deterministic given (config, seed, version): CSV
// output is byte-identical across re-runs. Wall time and environment
// notes go to metadata.json, which is excluded from that contract.
// =============================================================================

namespace steinfield {

struct RunOptions {
  std::optional<unsigned long long> seed;  // overrides seeds.master
  std::optional<std::string> out_dir;      // overrides output.dir
  int threads = 0;                         // 0: STEINFIELD_THREADS env, then 1
};

const std::vector<std::string>& experiment_names();

// Runs one experiment; returns the process exit code (0 success, 1 when
// an empirical check experiment fails its gate). Configuration errors,
// regime violations, and numerical failures are thrown as the matching
// exception types for the CLI to map onto exit codes 2/3/4.
int run_experiment(const std::string& experiment, const Config& cfg,
                   const RunOptions& opts);

}  // namespace steinfield
