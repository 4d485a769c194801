#include "rqmc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "rqmc/anova.hpp"
#include "rqmc/error.hpp"
#include "rqmc/parallel.hpp"
#include "rqmc/stats.hpp"

namespace rqmc {

namespace {

constexpr std::size_t kChunk = 4096;

void check_finite(std::span<const double> values, std::size_t offset) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw Error("non-finite integrand value at point " + std::to_string(offset + i));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

QuadratureEstimate estimate(const PointSet& ps, const IntegrandSpec& f, const ResidualStream& residual) {
  if (ps.dim() != f.dim) throw Error("dimension mismatch");
  const std::size_t N = ps.count();
  const auto s = static_cast<std::size_t>(ps.dim());
  std::vector<double> cols, vals;
  CompensatedSum acc;
  for (std::size_t begin = 0; begin < N; begin += kChunk) {
    const std::size_t len = std::min(kChunk, N - begin);
    cols.resize(len * s);
    vals.resize(len);
    const double inv = 1.0 / static_cast<double>(ps.scale());
    for (int j = 0; j < ps.dim(); ++j)
      for (std::size_t i = 0; i < len; ++i) {
        const double v = (static_cast<double>(ps.word(begin + i, j)) + residual(begin + i, j)) * inv;
        cols[static_cast<std::size_t>(j) * len + i] = v < 1.0 ? v : std::nextafter(1.0, 0.0);
      }
    evaluate_batch(f, cols, len, vals);
    check_finite(vals, begin);
    for (double v : vals) acc.add(v);
  }
  return {acc.value() / static_cast<double>(N), N};
}

std::vector<std::vector<double>> replicate_estimates(const GeneratorSpec& gen, ScrambleScheme scheme,
                                                     const IntegrandSpec& f, const std::vector<std::size_t>& N_list,
                                                     std::size_t R, std::uint64_t master_seed, int threads) {
  if (N_list.empty()) throw Error("empty grid");
  if (f.dim != gen.dim) throw Error("dimension mismatch");
  for (std::size_t i = 0; i < N_list.size(); ++i)
    if (N_list[i] < 1 || (i > 0 && N_list[i] <= N_list[i - 1])) throw Error("N grid must be strictly increasing");
  const std::size_t n_max = N_list.back();
  const PointSet base = generate(gen, n_max);
  std::vector<std::vector<double>> out(R, std::vector<double>(N_list.size()));
  parallel_for(R, threads, [&](std::size_t r) {
    const std::uint64_t seed = rng::derive(master_seed, r);
    PointSet scrambled = scramble(base, ScrambleState(seed, scheme));
    const ResidualStream residual(seed);
    const auto s = static_cast<std::size_t>(scrambled.dim());
    const double inv = 1.0 / static_cast<double>(scrambled.scale());
    std::vector<double> cols, vals;
    CompensatedSum acc;
    std::size_t next = 0;
    for (std::size_t begin = 0; begin < n_max; begin += kChunk) {
      const std::size_t len = std::min(kChunk, n_max - begin);
      cols.resize(len * s);
      vals.resize(len);
      for (int j = 0; j < scrambled.dim(); ++j) {
        const auto col = scrambled.column(j);
        for (std::size_t i = 0; i < len; ++i) {
          const double v = (static_cast<double>(col[begin + i]) + residual(begin + i, j)) * inv;
          cols[static_cast<std::size_t>(j) * len + i] = v < 1.0 ? v : std::nextafter(1.0, 0.0);
        }
      }
      evaluate_batch(f, cols, len, vals);
      check_finite(vals, begin);
      for (std::size_t i = 0; i < len; ++i) {
        acc.add(vals[i]);
        while (next < N_list.size() && N_list[next] == begin + i + 1) {
          out[r][next] = acc.value() / static_cast<double>(N_list[next]);
          ++next;
        }
      }
    }
  });
  return out;
}

MSEReport replicate(const GeneratorSpec& gen, ScrambleScheme scheme, const IntegrandSpec& f, double exact,
                    const std::vector<std::size_t>& N_list, std::size_t R, std::uint64_t master_seed, int threads) {
  if (R < 2) throw Error("need at least two replications");
  if (!std::isfinite(exact)) throw Error("exact value must be finite");
  const auto est = replicate_estimates(gen, scheme, f, N_list, R, master_seed, threads);
  MSEReport report;
  report.generator = to_string(gen.kind);
  report.scheme = to_string(scheme);
  report.integrand = f.name;
  report.dim = f.dim;
  report.seed = master_seed;
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    RunningMoments m;
    CompensatedSum se;
    for (std::size_t r = 0; r < R; ++r) {
      m.add(est[r][i]);
      se.add((est[r][i] - exact) * (est[r][i] - exact));
    }
    report.records.push_back({N_list[i], R, m.mean(), m.variance(), se.value() / static_cast<double>(R), exact});
  }
  return report;
}

void MSEReport::write_csv(std::ostream& out) const {
  out << "N,R,mean,variance,mse,exact\n";
  for (const auto& r : records)
    out << r.N << ',' << r.R << ',' << fmt(r.mean) << ',' << fmt(r.variance) << ',' << fmt(r.mse) << ','
        << fmt(r.exact) << '\n';
}

std::string MSEReport::metadata_json() const {
  nlohmann::json j;
  j["generator"] = generator;
  j["scheme"] = scheme;
  j["integrand"] = integrand;
  j["dim"] = dim;
  j["seed"] = seed;
  j["rows"] = records.size();
  return j.dump(2);
}

double bound_basic(int t, int s, int b, double sigma2, double N) {
  return gain_factor_bound(t + 1, s + 1, b) * sigma2 / N;
}

double bound_b1(int t, int s, int b, double sigma2, double N) {
  const double root = std::sqrt(gain_factor_bound(t, s, b) * (1.0 + 2.0 * c_b(b))) + std::pow(b, t) / std::sqrt(N);
  return sigma2 / N * root * root;
}

double bound_b2(double sigma2, double N) {
  return sigma2 / N * std::numbers::e * (3.0 + 2.0 * std::numbers::sqrt2);
}

double crossover_N(int b, int s) {
  require_base(b);
  if (s < 1) throw Error("s must be at least 1");
  const double r = (b + 1.0) / (b - 1.0);
  const double gap = std::sqrt(b * r) - std::sqrt(1.0 + 2.0 * c_b(b));
  return 1.0 / (std::pow(r, s) * gap * gap);
}

BoundReport bound_report(int t, int s, int b, double sigma2, double N) {
  if (sigma2 < 0.0 || N < 1.0) throw Error("bounds need sigma^2 >= 0 and N >= 1");
  BoundReport rep;
  rep.N = N;
  rep.t = t;
  rep.s = s;
  rep.b = b;
  rep.sigma2 = sigma2;
  rep.basic_bound = bound_basic(t, s, b, sigma2, N);
  if (t > 0 || b >= s) rep.b1_bound = bound_b1(t, s, b, sigma2, N);
  if (t == 0 && b >= s) rep.b2_bound = bound_b2(sigma2, N);
  rep.trivial_bound = sigma2;
  rep.crossover = std::max(1.0, crossover_N(b, s));
  return rep;
}

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["N"] = N;
  j["t"] = t;
  j["s"] = s;
  j["b"] = b;
  j["sigma2"] = sigma2;
  j["basic_bound"] = basic_bound;
  j["b1_bound"] = b1_bound ? nlohmann::json(*b1_bound) : nlohmann::json(nullptr);
  j["b2_bound"] = b2_bound ? nlohmann::json(*b2_bound) : nlohmann::json(nullptr);
  j["trivial_bound"] = trivial_bound;
  j["crossover"] = crossover;
  return j.dump(2);
}

double monte_carlo_variance(const IntegrandSpec& f, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw Error("need at least two samples");
  rng::CounterStream stream(rng::derive(seed, 0x6d63766172ULL));
  std::vector<double> x(static_cast<std::size_t>(f.dim));
  RunningMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = stream.uniform();
    m.add(f.fn(x));
  }
  return m.variance();
}

}  // namespace rqmc
