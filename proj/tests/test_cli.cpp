// =============================================================================
// Command-line driver tests, run against the installed binary: exit codes for
// bad invocations and for each error family, seeded determinism of the CSV
// outputs, and the seed/out-dir overrides.
// =============================================================================

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#if !defined(_WIN32)
#include <sys/wait.h>
#endif

namespace {

const std::string kCli = STEINFIELD_CLI_PATH;

// Runs the driver with the given argument string, capturing all output
// into `log`, and returns its exit code (-1 when it did not exit cleanly).
int run_cli(const std::string& args, const std::string& log = "cli_tmp/log.txt") {
  const std::string cmd = "\"" + kCli + "\" " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
#if defined(_WIN32)
  return status;
#else
  if (!WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
#endif
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct TmpDir {
  TmpDir() { std::filesystem::create_directories("cli_tmp"); }
} const tmp_dir;

}  // namespace

TEST_CASE("--version exits zero and prints the release number") {
  CHECK(run_cli("--version") == 0);
  CHECK(slurp("cli_tmp/log.txt").find("1.0.0") != std::string::npos);
}

TEST_CASE("bad invocations exit with the configuration code") {
  write_file("cli_tmp/ok.cfg", "grid.size = 8\nspectral.k = 16\n");
  // Missing positional experiment.
  CHECK(run_cli("--config cli_tmp/ok.cfg") == 2);
  // Missing required --config.
  CHECK(run_cli("kernel") == 2);
  // Unknown experiment name.
  CHECK(run_cli("frobnicate --config cli_tmp/ok.cfg") == 2);
  // Config file that does not exist.
  CHECK(run_cli("kernel --config cli_tmp/no_such.cfg") == 2);
  // Value of the wrong shape for a consumed key.
  write_file("cli_tmp/bad.cfg", "seeds.master = abc\n");
  CHECK(run_cli("kernel --config cli_tmp/bad.cfg") == 2);
}

TEST_CASE("kernel runs write their tables and repeat byte-for-byte") {
  write_file("cli_tmp/kernel.cfg",
             "experiment = kernel\n"
             "seeds.master = 3\n"
             "grid.kind = equiangular\n"
             "grid.size = 16\n"
             "spectral.n = 1\n"
             "spectral.iota = 1\n"
             "spectral.k = 64\n"
             "kernel.type = covariance\n");
  CHECK(run_cli("kernel --config cli_tmp/kernel.cfg --out cli_tmp/k1") == 0);
  CHECK(run_cli("kernel --config cli_tmp/kernel.cfg --out cli_tmp/k2") == 0);
  const std::string k1 = slurp("cli_tmp/k1/kernel.csv");
  CHECK(!k1.empty());
  CHECK(k1 == slurp("cli_tmp/k2/kernel.csv"));
  CHECK(slurp("cli_tmp/k1/grid.csv") == slurp("cli_tmp/k2/grid.csv"));
  CHECK(std::filesystem::exists("cli_tmp/k1/metadata.json"));
}

TEST_CASE("sample runs repeat for a fixed seed and move with it") {
  write_file("cli_tmp/sample.cfg",
             "experiment = sample\n"
             "seeds.master = 9\n"
             "grid.kind = equiangular\n"
             "grid.size = 12\n"
             "spectral.n = 1\n"
             "spectral.iota = 1\n"
             "spectral.k = 32\n"
             "sampler = cholesky\n"
             "mc.draws = 6\n");
  CHECK(run_cli("sample --config cli_tmp/sample.cfg --out cli_tmp/s1") == 0);
  CHECK(run_cli("sample --config cli_tmp/sample.cfg --out cli_tmp/s2") == 0);
  CHECK(run_cli("sample --config cli_tmp/sample.cfg --out cli_tmp/s3 --seed 10") == 0);
  const std::string s1 = slurp("cli_tmp/s1/samples.csv");
  CHECK(!s1.empty());
  // Same master seed: identical draws. Different seed: different draws.
  CHECK(s1 == slurp("cli_tmp/s2/samples.csv"));
  CHECK(s1 != slurp("cli_tmp/s3/samples.csv"));
}

TEST_CASE("regime violations exit with the regime code") {
  // p <= n leaves every width-exponent expression undefined.
  write_file("cli_tmp/regime.cfg",
             "experiment = bounds\n"
             "bounds.n = 1\n"
             "bounds.p = 0.5\n");
  CHECK(run_cli("bounds --config cli_tmp/regime.cfg --out cli_tmp/r1") == 3);
}

TEST_CASE("unattainable truncation tolerances exit with the numerical code") {
  // The tail majorant needs ~3e11 modes for tol 1e-12 at iota = 1,
  // far beyond the default spectral.max_k cap of 1e6.
  write_file("cli_tmp/tol.cfg",
             "experiment = kernel\n"
             "grid.size = 8\n"
             "spectral.n = 1\n"
             "spectral.iota = 1\n"
             "spectral.tol = 1e-12\n");
  CHECK(run_cli("kernel --config cli_tmp/tol.cfg --out cli_tmp/t1") == 4);
}
