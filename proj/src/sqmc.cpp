#include "rqmc/sqmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "rqmc/error.hpp"
#include "rqmc/normal.hpp"
#include "rqmc/parallel.hpp"
#include "rqmc/sequences.hpp"
#include "rqmc/stats.hpp"

namespace rqmc {

namespace {

constexpr std::uint64_t kSimStream = 0x73696dULL;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Fills u (column-major, dim columns) with the step-k inputs.
using UniformSource = std::function<void(int k, int dim, std::size_t N, std::vector<double>& u)>;

LikelihoodRun run_filter(const StateSpaceModel& model, const std::vector<double>& y, std::size_t N,
                         std::uint64_t seed, const UniformSource& source) {
  model.validate();
  if (N < 1) throw Error("N must be at least 1");
  if (y.empty()) throw Error("no observations");
  LikelihoodRun run;
  run.model = model.name;
  run.N = N;
  run.seed = seed;

  std::vector<double> u, z(N), z_prev(N), logw(N), w(N), cum(N);
  std::vector<std::size_t> order(N);
  const double log_n = std::log(static_cast<double>(N));
  double loglik = 0.0;

  for (std::size_t k = 0; k < y.size(); ++k) {
    const int step = static_cast<int>(k);
    if (k == 0) {
      source(0, 1, N, u);
      const double sd0 = std::sqrt(model.var0);
      for (std::size_t n = 0; n < N; ++n) z[n] = model.mu0 + sd0 * normal_quantile(u[n]);
    } else {
      source(step, 2, N, u);
      // Resampling through the weighted ECDF of the particle values.
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
      CompensatedSum run_w;
      for (std::size_t i = 0; i < N; ++i) {
        run_w.add(w[order[i]]);
        cum[i] = run_w.value();
      }
      const double total = cum[N - 1];
      for (std::size_t i = 0; i < N; ++i) cum[i] = std::min(1.0, cum[i] / total);
      cum[N - 1] = 1.0;
      z_prev.swap(z);
      for (std::size_t n = 0; n < N; ++n) {
        const double x = u[n];
        std::size_t i;
        if (x <= 0.0)
          i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), 0.0) - cum.begin());
        else
          i = std::min(N - 1, static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), x) - cum.begin()));
        const double anc = z_prev[order[i]];
        z[n] = model.mu_z(anc, step) + std::sqrt(model.var_z(anc, step)) * normal_quantile(u[N + n]);
      }
    }
    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < N; ++n) {
      logw[n] = normal_log_pdf(y[k], model.mu_y(z[n]), model.var_y(z[n]));
      if (std::isnan(logw[n])) throw Error("non-finite weight at step " + std::to_string(k));
      max_logw = std::max(max_logw, logw[n]);
    }
    if (!std::isfinite(max_logw)) throw Error("weight collapse at step " + std::to_string(k));
    CompensatedSum sw, sw2;
    for (std::size_t n = 0; n < N; ++n) {
      w[n] = std::exp(logw[n] - max_logw);
      sw.add(w[n]);
      sw2.add(w[n] * w[n]);
    }
    if (!(sw.value() > 0.0)) throw Error("weight collapse at step " + std::to_string(k));
    loglik += max_logw + std::log(sw.value()) - log_n;
    run.ess.push_back(sw.value() * sw.value() / sw2.value());
  }
  run.log_likelihood = loglik;
  return run;
}

}  // namespace

void StateSpaceModel::validate() const {
  if (!mu_y || !var_y || !mu_z || !var_z) throw Error("state space model is missing a function");
  if (!(var0 > 0.0) || !std::isfinite(mu0)) throw Error("initial variance must be positive");
  for (double z : {-10.0, -1.0, 0.0, 0.5, 3.0}) {
    if (!(var_y(z) > 0.0)) throw Error("observation variance must be positive");
    for (int k : {0, 1, 7})
      if (!(var_z(z, k) > 0.0)) throw Error("transition variance must be positive");
  }
}

StateSpaceModel StateSpaceModel::stochastic_volatility() {
  StateSpaceModel m;
  m.name = "sv";
  m.mu_y = [](double) { return 0.0; };
  m.var_y = [](double z) { return std::exp(-0.1 + z); };
  m.mu_z = [](double z, int) { return 0.9 * z; };
  m.var_z = [](double, int) { return 0.1; };
  m.mu0 = 0.0;
  m.var0 = 0.1 / (1.0 - 0.9 * 0.9);
  return m;
}

StateSpaceModel StateSpaceModel::nonlinear() {
  StateSpaceModel m;
  m.name = "nonlinear";
  m.mu_y = [](double z) { return z * z / 20.0; };
  m.var_y = [](double) { return 1.0; };
  m.mu_z = [](double z, int k) { return 0.5 * z + 25.0 * z / (1.0 + z * z) + 8.0 * std::cos(1.2 * k); };
  m.var_z = [](double, int) { return 10.0; };
  m.mu0 = 0.0;
  m.var0 = 2.0;
  return m;
}

StateSpaceModel make_model(const std::string& name) {
  if (name == "sv") return StateSpaceModel::stochastic_volatility();
  if (name == "nonlinear" || name == "nl") return StateSpaceModel::nonlinear();
  throw Error("unknown model '" + name + "'");
}

Trajectory simulate(const StateSpaceModel& model, int T, std::uint64_t seed) {
  model.validate();
  if (T < 1) throw Error("T must be at least 1");
  rng::CounterStream stream(rng::derive(seed, kSimStream));
  auto normal = [&] { return normal_quantile(stream.uniform()); };
  Trajectory tr;
  double z = model.mu0 + std::sqrt(model.var0) * normal();
  for (int k = 0; k < T; ++k) {
    if (k > 0) z = model.mu_z(z, k) + std::sqrt(model.var_z(z, k)) * normal();
    tr.states.push_back(z);
    tr.observations.push_back(model.mu_y(z) + std::sqrt(model.var_y(z)) * normal());
  }
  return tr;
}

std::vector<double> read_observations(std::istream& in) {
  std::vector<double> y;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::size_t used = 0;
      y.push_back(std::stod(line.substr(first), &used));
      if (line.find_first_not_of(" \t\r", first + used) != std::string::npos) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
      throw Error("malformed observation on line " + std::to_string(lineno));
    }
  }
  if (y.empty()) throw Error("no observations");
  return y;
}

LikelihoodRun sqmc_loglik(const StateSpaceModel& model, const std::vector<double>& y, std::size_t N,
                          std::uint64_t seed, const FilterOptions& opt) {
  if (N < 2) throw Error("SQMC needs N >= 2");
  const PointSet net1 = generate(GeneratorSpec::sobol(1), N);
  const PointSet net2 = generate(GeneratorSpec::sobol(2), N);
  PointSet work;
  return run_filter(model, y, N, seed, [&](int k, int dim, std::size_t n, std::vector<double>& u) {
    const std::uint64_t step_seed = rng::derive(seed, static_cast<std::uint64_t>(k));
    scramble_into(dim == 1 ? net1 : net2, ScrambleState(step_seed, opt.scheme), work);
    u.resize(n * static_cast<std::size_t>(dim));
    unit_values(work, ResidualStream(step_seed), u);
  });
}

LikelihoodRun smc_loglik(const StateSpaceModel& model, const std::vector<double>& y, std::size_t N,
                         std::uint64_t seed) {
  return run_filter(model, y, N, seed, [&](int k, int dim, std::size_t n, std::vector<double>& u) {
    rng::CounterStream stream(rng::derive(seed, static_cast<std::uint64_t>(k), 0x736d63ULL));
    u.resize(n * static_cast<std::size_t>(dim));
    for (auto& v : u) v = stream.uniform();
  });
}

void SweepReport::write_csv(std::ostream& out) const {
  out << "method,N,R,mean,variance,mse,exact\n";
  for (const auto* rep : {&sqmc, &smc})
    for (const auto& r : rep->records)
      out << (rep == &sqmc ? "sqmc" : "smc") << ',' << r.N << ',' << r.R << ',' << fmt(r.mean) << ','
          << fmt(r.variance) << ',' << fmt(r.mse) << ',' << fmt(r.exact) << '\n';
}

SweepReport mse_sweep(const StateSpaceModel& model, const std::vector<double>& y,
                      const std::vector<std::size_t>& N_list, std::size_t R, std::uint64_t master_seed,
                      double reference, int threads, bool include_smc) {
  if (N_list.empty()) throw Error("empty grid");
  if (R < 2) throw Error("need at least two replications");
  const std::size_t methods = include_smc ? 2 : 1;
  std::vector<double> est(methods * N_list.size() * R);
  // Task = (method, N, replication); each writes its own slot.
  parallel_for(est.size(), threads, [&](std::size_t task) {
    const std::size_t r = task % R;
    const std::size_t i = (task / R) % N_list.size();
    const std::size_t m = task / (R * N_list.size());
    const std::uint64_t seed = rng::derive(master_seed, N_list[i], r);
    est[task] = m == 0 ? sqmc_loglik(model, y, N_list[i], seed).log_likelihood
                       : smc_loglik(model, y, N_list[i], seed).log_likelihood;
  });
  SweepReport rep;
  for (std::size_t m = 0; m < 2; ++m) {
    MSEReport& out = m == 0 ? rep.sqmc : rep.smc;
    out.generator = m == 0 ? "sobol" : "iid";
    out.scheme = m == 0 ? "owen" : "none";
    out.integrand = model.name;
    out.dim = 1;
    out.seed = master_seed;
    if (m >= methods) continue;
    for (std::size_t i = 0; i < N_list.size(); ++i) {
      RunningMoments mom;
      CompensatedSum se;
      for (std::size_t r = 0; r < R; ++r) {
        const double v = est[(m * N_list.size() + i) * R + r];
        mom.add(v);
        se.add((v - reference) * (v - reference));
      }
      out.records.push_back({N_list[i], R, mom.mean(), mom.variance(), se.value() / static_cast<double>(R), reference});
    }
  }
  return rep;
}

double reference_loglik(const StateSpaceModel& model, const std::vector<double>& y, std::size_t N, std::size_t R,
                        std::uint64_t seed, int threads) {
  if (R < 1) throw Error("need at least one replication");
  std::vector<double> v(R);
  parallel_for(R, threads, [&](std::size_t r) { v[r] = sqmc_loglik(model, y, N, rng::derive(seed, 0x726566ULL, r)).log_likelihood; });
  RunningMoments m;
  for (double x : v) m.add(x);
  return m.mean();
}

}  // namespace rqmc
