#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rqmc/anova.hpp"
#include "rqmc/cli.hpp"
#include "rqmc/error.hpp"
#include "rqmc/integrands.hpp"
#include "rqmc/netcheck.hpp"
#include "rqmc/parallel.hpp"
#include "rqmc/quadrature.hpp"
#include "rqmc/scrambling.hpp"
#include "rqmc/sequences.hpp"
#include "rqmc/sir.hpp"
#include "rqmc/sqmc.hpp"
#include "rqmc/stats.hpp"

#ifndef RQMC_VERSION
#define RQMC_VERSION "0.0.0"
#endif

namespace rqmc::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GeneratorSpec generator_of(const RunConfig& c) {
  const SequenceKind kind = parse_sequence_kind(c.generator);
  switch (kind) {
    case SequenceKind::sobol: return GeneratorSpec::sobol(c.dim);
    case SequenceKind::faure: return GeneratorSpec::faure(c.base, c.dim);
    case SequenceKind::van_der_corput:
      if (c.dim != 1) throw Error("unsupported dimension");
      return GeneratorSpec::van_der_corput(c.base);
  }
  throw Error("unknown generator");
}

int t_of(const GeneratorSpec& g) { return g.kind == SequenceKind::sobol ? sobol_t_value(g.dim, g.table()) : 0; }

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["subcommand"] = c.subcommand;
  j["generator"] = c.generator;
  j["dim"] = c.dim;
  j["base"] = c.base;
  j["scheme"] = c.scheme;
  j["seed"] = c.seed;
  j["grid"] = c.grid;
  j["N_list"] = c.N_list;
  j["N"] = c.N;
  j["reps"] = c.reps;
  j["integrand"] = c.integrand;
  j["model"] = c.model;
  j["problem"] = c.problem;
  j["sampler"] = c.sampler;
  j["output"] = c.output;
  j["observations"] = c.observations;
  j["obs_seed"] = c.obs_seed;
  j["T"] = c.T;
  j["m"] = c.m;
  j["t"] = c.t ? nlohmann::json(*c.t) : nlohmann::json(nullptr);
  j["lambda"] = c.lambda;
  j["offset"] = c.offset;
  j["sigma2"] = c.sigma2;
  j["depth"] = c.depth;
  j["resolution"] = c.resolution;
  j["reference"] = c.reference ? nlohmann::json(*c.reference) : nlohmann::json(nullptr);
  j["ref_N"] = c.ref_N;
  j["ref_reps"] = c.ref_reps;
  j["smc"] = c.smc;
  j["threads"] = c.threads;
  j["config_file"] = c.config_file;
  j["argv"] = c.argv;
  return j;
}

// Command output goes to the --output file when given, else to `out`.
class Sink {
 public:
  Sink(const RunConfig& c, std::ostream& out) : path_(c.output), out_(&out) {
    if (!path_.empty()) {
      file_.open(path_, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error("cannot open '" + path_ + "' for writing");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }
  void close(const RunConfig& c, const nlohmann::json& extra, double wall_time) {
    if (path_.empty()) return;
    file_.close();
    if (!file_) throw Error("write to '" + path_ + "' failed");
    nlohmann::json side;
    side["config"] = config_json(c);
    side["version"] = RQMC_VERSION;
    side["compiler"] = __VERSION__;
    side["metadata"] = extra;
    side["wall_time"] = wall_time;
    std::ofstream js(path_ + ".json", std::ios::binary | std::ios::trunc);
    js << side.dump(2) << "\n";
    if (!js) throw Error("write to '" + path_ + ".json' failed");
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* out_;
};

void require_grid(const RunConfig& c) {
  if (c.N_list.empty()) throw GridError("empty grid");
}

int cmd_generate(const RunConfig& c, Sink& sink) {
  const GeneratorSpec g = generator_of(c);
  PointSet ps = generate_range(g, c.offset, c.offset + c.N);
  std::ostream& os = sink.stream();
  os << "n";
  for (int j = 0; j < ps.dim(); ++j) os << ",x" << (j + 1);
  os << "\n";
  if (c.scheme == "none") {
    for (std::size_t n = 0; n < ps.count(); ++n) {
      os << (c.offset + n);
      for (int j = 0; j < ps.dim(); ++j) os << "," << fmt(ps.value(n, j));
      os << "\n";
    }
  } else {
    const ScrambleState st(c.seed, parse_scramble_scheme(c.scheme));
    ps = scramble(ps, st);
    const ResidualStream residual(c.seed);
    for (std::size_t n = 0; n < ps.count(); ++n) {
      os << (c.offset + n);
      for (int j = 0; j < ps.dim(); ++j) os << "," << fmt(point_value(ps, n, j, residual));
      os << "\n";
    }
  }
  return ok;
}

int cmd_check_net(const RunConfig& c, std::ostream& out) {
  const GeneratorSpec g = generator_of(c);
  if (c.lambda < 1 || c.lambda >= g.base) throw Error("lambda must lie in [1, b-1]");
  const int t = c.t.value_or(t_of(g));
  const std::size_t count = static_cast<std::size_t>(c.lambda) * ipow(static_cast<std::uint64_t>(g.base), c.m);
  PointSet ps = generate_range(g, c.offset, c.offset + count);
  if (c.scheme != "none") ps = scramble(ps, ScrambleState(c.seed, parse_scramble_scheme(c.scheme)));
  const bool pass = c.lambda == 1 ? is_tms_net(ps, t, c.m) : is_lambda_tms_net(ps, c.lambda, t, c.m);
  out << (pass ? "PASS" : "FAIL") << ": " << count << " points of " << c.generator << " (dim " << c.dim
      << ", base " << g.base << ") " << (pass ? "form" : "do not form") << " a (" << c.lambda << "," << t << ","
      << c.m << "," << c.dim << ")-net\n";
  return pass ? ok : check_failed;
}

int cmd_quadrature(const RunConfig& c, std::ostream& out) {
  const GeneratorSpec g = generator_of(c);
  const IntegrandSpec f = make_integrand(c.integrand, g.dim);
  const PointSet ps = scramble(generate(g, c.N), ScrambleState(c.seed, parse_scramble_scheme(c.scheme)));
  const QuadratureEstimate e = estimate(ps, f, ResidualStream(c.seed));
  nlohmann::json j;
  j["integrand"] = f.name;
  j["dim"] = g.dim;
  j["N"] = c.N;
  j["seed"] = c.seed;
  j["estimate"] = e.value;
  if (f.id != IntegrandId::custom || f.integral) {
    const double exact = exact_integral(f);
    j["exact"] = exact;
    j["error"] = e.value - exact;
  }
  out << j.dump(2) << "\n";
  return ok;
}

int cmd_sweep(const RunConfig& c, Sink& sink, nlohmann::json& meta) {
  require_grid(c);
  const GeneratorSpec g = generator_of(c);
  const IntegrandSpec f = make_integrand(c.integrand, g.dim);
  const MSEReport rep = replicate(g, parse_scramble_scheme(c.scheme), f, exact_integral(f), c.N_list, c.reps,
                                  c.seed, c.threads);
  rep.write_csv(sink.stream());
  meta = nlohmann::json::parse(rep.metadata_json());
  return ok;
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
  if (!c.t) throw Error("--t is required");
  out << bound_report(*c.t, c.dim, c.base, c.sigma2, static_cast<double>(c.N)).to_json() << "\n";
  return ok;
}

int cmd_anova(const RunConfig& c, Sink& sink) {
  const IntegrandSpec f = make_integrand(c.integrand, c.dim);
  int resolution = c.resolution;
  if (resolution == 0) resolution = static_cast<int>(ipow(static_cast<std::uint64_t>(c.base), c.depth + 1));
  std::optional<double> sigma2;
  if (f.id != IntegrandId::custom || f.variance) sigma2 = exact_variance(f);
  const AnovaTable table = build_anova_table(f.fn, c.dim, c.base, c.depth, resolution, sigma2, c.threads);
  nlohmann::json j;
  j["table"] = nlohmann::json::parse(table.to_json());
  if (!c.N_list.empty()) {
    if (!c.t) throw Error("--t is required with --grid");
    auto& list = j["bounds"] = nlohmann::json::array();
    for (std::size_t N : c.N_list)
      list.push_back({{"N", N}, {"bound", theorem1_bound(table, N, *c.t, c.base, c.dim)}});
  }
  sink.stream() << j.dump(2) << "\n";
  return ok;
}

SirProblem linear_problem() {
  SirProblem p;
  p.dim = 1;
  p.target = [](std::span<const double> z) { return 2.0 * z[0]; };
  p.proposal = [](std::span<const double>) { return 1.0; };
  p.proposal_inverse = [](std::span<const double> u, std::span<double> z) { z[0] = u[0]; };
  p.f = [](std::span<const double> z) { return z[0]; };
  return p;
}

int cmd_sir(const RunConfig& c, Sink& sink, nlohmann::json& meta) {
  require_grid(c);
  const SirProblem prob = linear_problem();
  const double exact = 2.0 / 3.0;
  SirOptions opt;
  opt.sampler = c.sampler == "mc" ? Sampler::monte_carlo : Sampler::rqmc;
  opt.scheme = parse_scramble_scheme(c.scheme == "none" ? "owen" : c.scheme);
  if (c.reps < 2) throw Error("at least two replications are required");
  std::vector<std::vector<double>> est(c.reps, std::vector<double>(c.N_list.size()));
  parallel_for(c.reps, c.threads, [&](std::size_t r) {
    for (std::size_t i = 0; i < c.N_list.size(); ++i)
      est[r][i] = sir_estimate(prob, c.N_list[i], rng::derive(c.seed, r), opt);
  });
  MSEReport rep;
  rep.generator = "sobol";
  rep.scheme = c.sampler == "mc" ? "iid" : to_string(opt.scheme);
  rep.integrand = "sir-" + c.problem;
  rep.dim = 1;
  rep.seed = c.seed;
  for (std::size_t i = 0; i < c.N_list.size(); ++i) {
    RunningMoments mom;
    double se = 0.0;
    for (std::size_t r = 0; r < c.reps; ++r) {
      mom.add(est[r][i]);
      se += (est[r][i] - exact) * (est[r][i] - exact);
    }
    rep.records.push_back({c.N_list[i], c.reps, mom.mean(), mom.variance(), se / static_cast<double>(c.reps), exact});
  }
  rep.write_csv(sink.stream());
  meta = nlohmann::json::parse(rep.metadata_json());
  return ok;
}

std::vector<double> observations_of(const RunConfig& c, const StateSpaceModel& model) {
  if (c.observations.empty()) return simulate(model, c.T, c.obs_seed).observations;
  std::ifstream in(c.observations);
  if (!in) throw Error("cannot open '" + c.observations + "'");
  return read_observations(in);
}

int cmd_sqmc(const RunConfig& c, Sink& sink, nlohmann::json& meta) {
  require_grid(c);
  const StateSpaceModel model = make_model(c.model);
  const std::vector<double> y = observations_of(c, model);
  const double reference =
      c.reference ? *c.reference : reference_loglik(model, y, c.ref_N, c.ref_reps, rng::derive(c.seed, 0x726566), c.threads);
  const SweepReport rep = mse_sweep(model, y, c.N_list, c.reps, c.seed, reference, c.threads, c.smc);
  rep.write_csv(sink.stream());
  meta["model"] = model.name;
  meta["T"] = y.size();
  meta["reference"] = reference;
  meta["seed"] = c.seed;
  return ok;
}

int cmd_simulate(const RunConfig& c, Sink& sink) {
  const Trajectory tr = simulate(make_model(c.model), c.T, c.seed);
  std::ostream& os = sink.stream();
  os << "k,state,observation\n";
  for (std::size_t k = 0; k < tr.states.size(); ++k)
    os << k << "," << fmt(tr.states[k]) << "," << fmt(tr.observations[k]) << "\n";
  return ok;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  set_thread_limit(c.threads);
  const auto start = std::chrono::steady_clock::now();
  try {
    Sink sink(c, out);
    nlohmann::json meta = nlohmann::json::object();
    int code = ok;
    const std::string& s = c.subcommand;
    if (s == "generate") code = cmd_generate(c, sink);
    else if (s == "check-net") code = cmd_check_net(c, sink.stream());
    else if (s == "quadrature") code = cmd_quadrature(c, sink.stream());
    else if (s == "sweep-mse") code = cmd_sweep(c, sink, meta);
    else if (s == "bounds") code = cmd_bounds(c, sink.stream());
    else if (s == "anova") code = cmd_anova(c, sink);
    else if (s == "sir") code = cmd_sir(c, sink, meta);
    else if (s == "sqmc") code = cmd_sqmc(c, sink, meta);
    else if (s == "simulate") code = cmd_simulate(c, sink);
    else {
      err << "error: unknown subcommand '" << s << "'\n";
      return usage;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sink.close(c, meta, wall);
    if (c.output.empty()) out.flush();
    return code;
  } catch (const GridError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return runtime;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  const ParseResult p = parse_args(args, out, err);
  if (!p.run) return p.exit_code;
  return run(p.config, out, err);
}

}  // namespace rqmc::cli
