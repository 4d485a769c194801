#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rqmc::cli {

enum ExitCode : int { ok = 0, check_failed = 1, usage = 2, runtime = 3 };

/// Flat configuration shared by all subcommands; each uses the fields it
/// needs.
struct RunConfig {
  std::string subcommand;
  std::string generator = "sobol";
  int dim = 1;
  int base = 2;
  std::string scheme = "owen";  // owen | linear | none
  std::uint64_t seed = 0;
  std::string grid;             // powers:b:m_min:m_max or arith:start:step:count
  std::vector<std::size_t> N_list;
  std::size_t N = 1;
  std::size_t reps = 100;
  std::string integrand = "phi1";
  std::string model = "sv";
  std::string problem = "linear";
  std::string sampler = "rqmc";
  std::string output;           // empty: standard output, no sidecar
  std::string observations;     // CSV of observations for sqmc
  std::uint64_t obs_seed = 1;
  int T = 100;
  int m = 0;
  std::optional<int> t;
  int lambda = 1;
  std::uint64_t offset = 0;
  double sigma2 = 1.0;
  int depth = 8;
  int resolution = 0;           // 0: b^(K+1)
  std::optional<double> reference;
  std::size_t ref_N = 1 << 17;
  std::size_t ref_reps = 50;
  bool smc = true;
  int threads = 0;
  std::string config_file;
  std::vector<std::string> argv;  // echo for the sidecar
};

struct ParseResult {
  int exit_code = ok;
  bool run = false;       // false: help printed or usage error
  RunConfig config;
};

/// Parses `args` (without the program name). Usage errors print to `err`
/// and give exit code 2; --help prints to `out` and gives 0.
ParseResult parse_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands a grid spec. Throws GridError on malformed or empty grids.
std::vector<std::size_t> parse_grid(const std::string& spec);

struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Executes a parsed configuration; returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args followed by run.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rqmc::cli
