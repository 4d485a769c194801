#include "rqmc/sir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rqmc/error.hpp"
#include "rqmc/sequences.hpp"
#include "rqmc/stats.hpp"

namespace rqmc {

namespace {

constexpr std::uint64_t kProposalStream = 1;
constexpr std::uint64_t kResampleStream = 2;

// Points of a scrambled Sobol' set (with residuals) or i.i.d. uniforms,
// column-major.
std::vector<double> uniforms(int dim, std::size_t N, std::uint64_t seed, const SirOptions& opt) {
  if (opt.sampler == Sampler::monte_carlo) {
    rng::CounterStream stream(seed);
    std::vector<double> u(N * static_cast<std::size_t>(dim));
    for (auto& v : u) v = stream.uniform();
    return u;
  }
  const PointSet ps = scramble(generate(GeneratorSpec::sobol(dim), N), ScrambleState(seed, opt.scheme));
  return unit_values(ps, ResidualStream(seed));
}

}  // namespace

void SirProblem::validate() const {
  if (dim < 1 || dim > 2) throw Error("SIR supports s in {1,2}");
  if (!target || !proposal || !proposal_inverse || !f) throw Error("SIR problem is missing a function");
}

WeightedCloud make_cloud(int dim, std::span<const double> z, std::span<const double> w, int hilbert_order) {
  if (dim < 1 || dim > 2) throw Error("SIR supports s in {1,2}");
  const std::size_t N = w.size();
  if (N == 0 || z.size() != N * static_cast<std::size_t>(dim)) throw Error("particle arrays do not match");
  const HilbertOrder ord{dim, dim == 1 ? 31 : hilbert_order};
  std::vector<double> key(N);
  bool any_positive = false;
  for (std::size_t n = 0; n < N; ++n) {
    if (!std::isfinite(w[n]) || w[n] < 0.0) throw Error("non-finite weight at particle " + std::to_string(n));
    any_positive = any_positive || w[n] > 0.0;
    const auto loc = z.subspan(n * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    key[n] = dim == 1 ? loc[0] : hilbert_inverse(loc, ord);
  }
  if (!any_positive) throw Error("degenerate weights");
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Ties on the key fall back to the location and weight, so the order is
  // canonical whatever order the particles arrive in.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] < key[b];
    for (int j = 0; j < dim; ++j) {
      const double za = z[a * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
      const double zb = z[b * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
      if (za != zb) return za < zb;
    }
    return w[a] < w[b];
  });
  WeightedCloud c;
  c.dim = dim;
  c.z.resize(z.size());
  c.w.resize(N);
  c.keys.resize(N);
  c.W.resize(N);
  c.cum.resize(N);
  CompensatedSum total;
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t n = order[i];
    for (int j = 0; j < dim; ++j)
      c.z[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)] =
          z[n * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
    c.w[i] = w[n];
    c.keys[i] = key[n];
    total.add(w[n]);
  }
  const double sum = total.value();
  CompensatedSum run;
  for (std::size_t i = 0; i < N; ++i) {
    c.W[i] = c.w[i] / sum;
    run.add(c.w[i]);
    c.cum[i] = std::min(1.0, run.value() / sum);
  }
  c.cum.back() = 1.0;
  return c;
}

std::size_t ecdf_inverse_index(const WeightedCloud& cloud, double u) {
  if (cloud.cum.empty()) throw Error("empty cloud");
  if (u <= 0.0) {
    const auto it = std::upper_bound(cloud.cum.begin(), cloud.cum.end(), 0.0);
    return static_cast<std::size_t>(it - cloud.cum.begin());
  }
  const auto it = std::lower_bound(cloud.cum.begin(), cloud.cum.end(), u);
  if (it == cloud.cum.end()) return cloud.cum.size() - 1;
  return static_cast<std::size_t>(it - cloud.cum.begin());
}

double ecdf_inverse(const WeightedCloud& cloud, double u) { return cloud.keys[ecdf_inverse_index(cloud, u)]; }

double sir_estimate(const SirProblem& prob, std::size_t N, std::uint64_t seed, const SirOptions& opt) {
  prob.validate();
  if (N < 1) throw Error("N must be at least 1");
  const auto s = static_cast<std::size_t>(prob.dim);
  const auto u1 = uniforms(prob.dim, N, rng::derive(seed, kProposalStream), opt);
  const auto u2 = uniforms(1, N, rng::derive(seed, kResampleStream), opt);
  std::vector<double> z(N * s), w(N), in(s), out(s);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t j = 0; j < s; ++j) in[j] = u1[j * N + n];
    prob.proposal_inverse(in, out);
    std::copy(out.begin(), out.end(), z.begin() + static_cast<std::ptrdiff_t>(n * s));
    w[n] = prob.target(out) / prob.proposal(out);
  }
  const WeightedCloud cloud = make_cloud(prob.dim, z, w, opt.hilbert_order);
  CompensatedSum acc;
  for (std::size_t n = 0; n < N; ++n) acc.add(prob.f(cloud.location(ecdf_inverse_index(cloud, u2[n]))));
  return acc.value() / static_cast<double>(N);
}

}  // namespace rqmc
