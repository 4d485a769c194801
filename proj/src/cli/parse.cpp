#include <algorithm>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "rqmc/cli.hpp"

namespace rqmc::cli {

namespace {

const char* const kSubcommands[] = {"generate", "check-net", "quadrature", "sweep-mse", "bounds",
                                    "anova",    "sir",       "sqmc",       "simulate"};

std::size_t to_size(const std::string& s, const std::string& spec) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw GridError("malformed grid '" + spec + "'");
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    throw GridError("malformed grid '" + spec + "'");
  }
}

// key = value lines -> "--key value" tokens.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw CLI::ParseError("config line without '=': " + line, CLI::ExitCodes::InvalidError);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw CLI::ParseError("config line without key: " + line, CLI::ExitCodes::InvalidError);
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

void add_generator(CLI::App* sub, RunConfig& c) {
  sub->add_option("--gen", c.generator, "Sequence: sobol, faure or vdc")->check(CLI::IsMember({"sobol", "faure", "vdc"}));
  sub->add_option("--dim", c.dim, "Dimension s")->check(CLI::PositiveNumber);
  sub->add_option("--base", c.base, "Base (faure and vdc)")->check(CLI::Range(2, 1 << 16));
}

void add_scheme(CLI::App* sub, RunConfig& c, bool allow_none) {
  std::vector<std::string> names{"owen", "linear", "matousek"};
  if (allow_none) names.push_back("none");
  sub->add_option("--scramble", c.scheme, "Scrambling: owen or linear" + std::string(allow_none ? " or none" : ""))
      ->check(CLI::IsMember(names));
}

void add_seed(CLI::App* sub, RunConfig& c) { sub->add_option("--seed", c.seed, "Master seed (decimal 64-bit, default 0)"); }

void add_output(CLI::App* sub, RunConfig& c) {
  sub->add_option("-o,--output", c.output, "CSV output path; a .json sidecar is written next to it");
}

}  // namespace

std::vector<std::size_t> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw GridError("malformed grid '" + spec + "'");
  std::vector<std::size_t> grid;
  if (parts[0] == "powers") {
    const std::size_t b = to_size(parts[1], spec), lo = to_size(parts[2], spec), hi = to_size(parts[3], spec);
    if (b < 2 || hi > 62) throw GridError("malformed grid '" + spec + "'");
    for (std::size_t m = lo; m <= hi; ++m) {
      std::size_t v = 1;
      for (std::size_t e = 0; e < m; ++e) {
        if (v > (std::size_t{1} << 62) / b) throw GridError("grid value overflows");
        v *= b;
      }
      grid.push_back(v);
    }
  } else if (parts[0] == "arith") {
    const std::size_t start = to_size(parts[1], spec), step = to_size(parts[2], spec), count = to_size(parts[3], spec);
    if (start < 1 || (step == 0 && count > 1)) throw GridError("grid must be strictly increasing");
    for (std::size_t i = 0; i < count; ++i) grid.push_back(start + i * step);
  } else {
    throw GridError("malformed grid '" + spec + "'");
  }
  if (grid.empty()) throw GridError("empty grid");
  return grid;
}

ParseResult parse_args(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  ParseResult result;
  RunConfig& c = result.config;
  c.argv = args_in;

  CLI::App app{"Randomized quasi-Monte Carlo toolkit: scrambled (t,s)-sequences, variance bounds, SIR and SQMC.",
               "rqmc"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", c.config_file, "key = value file; command-line flags override it");
  app.add_option("--threads", c.threads, "Worker threads (default: all cores); results do not depend on it")
      ->check(CLI::NonNegativeNumber);
  app.footer(
      "Grids: powers:b:m_min:m_max gives b^m for m_min <= m <= m_max; arith:start:step:count gives start + i*step.\n"
      "Exit codes: 0 ok, 1 check failed, 2 usage error, 3 runtime error.");

  auto* gen = app.add_subcommand("generate", "Write the first N points of a (scrambled) sequence as CSV");
  add_generator(gen, c);
  add_scheme(gen, c, true);
  add_seed(gen, c);
  add_output(gen, c);
  gen->add_option("--N", c.N, "Number of points")->required()->check(CLI::PositiveNumber);
  gen->add_option("--offset", c.offset, "Index of the first point");

  auto* net = app.add_subcommand("check-net", "Exhaustive (lambda,t,m,s)-net check of lambda*b^m points");
  add_generator(net, c);
  add_scheme(net, c, true);
  add_seed(net, c);
  net->add_option("--m", c.m, "Net exponent m")->required()->check(CLI::NonNegativeNumber);
  net->add_option("--t", c.t, "Quality parameter (default: the generator's t)")->check(CLI::NonNegativeNumber);
  net->add_option("--lambda", c.lambda, "lambda in [1, b-1]")->check(CLI::PositiveNumber);
  net->add_option("--offset", c.offset, "Index of the first point");

  auto* quad = app.add_subcommand("quadrature", "One scrambled-net estimate of an integrand");
  add_generator(quad, c);
  add_scheme(quad, c, false);
  add_seed(quad, c);
  quad->add_option("--integrand", c.integrand, "phi1, phi2, phi3, phi4 or a registered name");
  quad->add_option("--N", c.N, "Number of points")->required()->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep-mse", "Replicated MSE of scrambled quadrature over an N grid");
  add_generator(sweep, c);
  add_scheme(sweep, c, false);
  add_seed(sweep, c);
  add_output(sweep, c);
  sweep->add_option("--integrand", c.integrand, "phi1, phi2, phi3, phi4 or a registered name");
  sweep->add_option("--grid", c.grid, "N grid")->required();
  sweep->add_option("--reps", c.reps, "Replications R >= 2")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));

  auto* bounds = app.add_subcommand("bounds", "Closed-form variance bounds and the crossover size");
  bounds->add_option("--t", c.t, "Quality parameter t")->required()->check(CLI::NonNegativeNumber);
  bounds->add_option("--s", c.dim, "Dimension s")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--b", c.base, "Base b")->required()->check(CLI::Range(2, 1 << 16));
  bounds->add_option("--sigma2", c.sigma2, "Integrand variance")->check(CLI::NonNegativeNumber);
  bounds->add_option("--N", c.N, "Quadrature size")->check(CLI::PositiveNumber);

  auto* anova = app.add_subcommand("anova", "Haar-like ANOVA table and the variance bound it implies");
  anova->add_option("--integrand", c.integrand, "phi1, phi2, phi3, phi4 or a registered name");
  anova->add_option("--dim", c.dim, "Dimension s <= 3")->check(CLI::Range(1, 3));
  anova->add_option("--base", c.base, "Base b")->check(CLI::Range(2, 64));
  anova->add_option("--depth", c.depth, "Truncation K <= 12")->check(CLI::Range(0, 12));
  anova->add_option("--resolution", c.resolution, "Midpoint grid per axis (multiple of b^(K+1); default b^(K+1))");
  anova->add_option("--t", c.t, "Quality parameter for the bound column")->check(CLI::NonNegativeNumber);
  anova->add_option("--grid", c.grid, "N grid for the bound column");
  add_output(anova, c);

  auto* sir = app.add_subcommand("sir", "Replicated QMC sampling importance resampling");
  sir->add_option("--problem", c.problem, "linear: pi(z) = 2z, q uniform, f(z) = z")->check(CLI::IsMember({"linear"}));
  sir->add_option("--sampler", c.sampler, "rqmc or mc")->check(CLI::IsMember({"rqmc", "mc"}));
  sir->add_option("--grid", c.grid, "N grid")->required();
  sir->add_option("--reps", c.reps, "Replications R >= 2")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  add_seed(sir, c);
  add_output(sir, c);

  auto* sqmc = app.add_subcommand("sqmc", "MSE of SQMC and SMC log-likelihood estimates over an N grid");
  sqmc->add_option("--model", c.model, "sv or nonlinear")->check(CLI::IsMember({"sv", "nonlinear", "nl"}));
  sqmc->add_option("--T", c.T, "Number of observations to simulate")->check(CLI::PositiveNumber);
  sqmc->add_option("--obs", c.observations, "Observation CSV (one value per line) instead of simulating");
  sqmc->add_option("--obs-seed", c.obs_seed, "Seed of the simulated observations");
  sqmc->add_option("--grid", c.grid, "N grid")->required();
  sqmc->add_option("--reps", c.reps, "Replications R >= 2")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  sqmc->add_option("--reference", c.reference, "Reference log-likelihood (default: high-N SQMC mean)");
  sqmc->add_option("--ref-N", c.ref_N, "Particles of the reference runs")->check(CLI::PositiveNumber);
  sqmc->add_option("--ref-reps", c.ref_reps, "Number of reference runs")->check(CLI::PositiveNumber);
  sqmc->add_option("--smc", c.smc, "Also run the Monte Carlo filter (true/false)");
  add_seed(sqmc, c);
  add_output(sqmc, c);

  auto* sim = app.add_subcommand("simulate", "Simulate states and observations of a model");
  sim->add_option("--model", c.model, "sv or nonlinear")->check(CLI::IsMember({"sv", "nonlinear", "nl"}));
  sim->add_option("--T", c.T, "Number of time steps")->check(CLI::PositiveNumber);
  add_seed(sim, c);
  add_output(sim, c);

  try {
    // --config is expanded in place: its entries go right after the
    // subcommand so that later command-line flags take precedence.
    std::vector<std::string> args;
    std::string config_path;
    for (std::size_t i = 0; i < args_in.size(); ++i) {
      if (args_in[i] == "--config") {
        if (i + 1 >= args_in.size()) throw CLI::ArgumentMismatch("--config", 1, 0);
        config_path = args_in[++i];
      } else if (args_in[i].rfind("--config=", 0) == 0) {
        config_path = args_in[i].substr(9);
      } else {
        args.push_back(args_in[i]);
      }
    }
    if (!config_path.empty()) {
      c.config_file = config_path;
      const auto extra = read_config(config_path);
      auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return std::find(std::begin(kSubcommands), std::end(kSubcommands), a) != std::end(kSubcommands);
      });
      if (it != args.end()) args.insert(it + 1, extra.begin(), extra.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    result.exit_code = ok;
    return result;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    result.exit_code = ok;
    return result;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << "run '" << "rqmc " << (subs.empty() ? "" : subs.front()->get_name() + " ") << "--help' for usage\n";
    result.exit_code = usage;
    return result;
  }

  c.subcommand = app.get_subcommands().front()->get_name();
  if (!c.grid.empty()) {
    try {
      c.N_list = parse_grid(c.grid);
    } catch (const GridError& e) {
      err << "error: " << e.what() << "\n";
      result.exit_code = usage;
      return result;
    }
  }
  result.run = true;
  return result;
}

}  // namespace rqmc::cli
