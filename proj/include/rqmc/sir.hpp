#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rqmc/hilbert.hpp"
#include "rqmc/scrambling.hpp"

namespace rqmc {

/// Target pi and proposal q on [0,1)^s, the proposal's Rosenblatt inverse
/// (uniforms -> draw) and the test function f.
struct SirProblem {
  int dim = 1;
  std::function<double(std::span<const double>)> target;
  std::function<double(std::span<const double>)> proposal;
  std::function<void(std::span<const double> u, std::span<double> z)> proposal_inverse;
  std::function<double(std::span<const double>)> f;

  void validate() const;
};

/// Particles sorted by Hilbert key with normalized cumulative weights.
/// Row-major locations; for s = 1 the key is the location itself.
struct WeightedCloud {
  int dim = 1;
  std::vector<double> z;       // sorted, N x dim
  std::vector<double> w;       // raw weights in sorted order
  std::vector<double> keys;    // h(z) in [0,1), ascending
  std::vector<double> W;       // normalized weights
  std::vector<double> cum;     // cum[i] = W[0] + ... + W[i], cum.back() = 1

  std::size_t size() const noexcept { return w.size(); }
  std::span<const double> location(std::size_t i) const {
    return {z.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Builds the cloud from unsorted locations and raw weights. Throws
/// "non-finite weight at particle n" and "degenerate weights". The order of
/// the input particles does not affect the result.
WeightedCloud make_cloud(int dim, std::span<const double> z, std::span<const double> w, int hilbert_order = 31);

/// Sorted index i minimizing keys[i] subject to cum[i] >= u (the generalized
/// inverse, inf convention). u <= 0 selects the first particle with positive
/// weight.
std::size_t ecdf_inverse_index(const WeightedCloud& cloud, double u);
/// The Hilbert key of that particle.
double ecdf_inverse(const WeightedCloud& cloud, double u);

enum class Sampler { rqmc, monte_carlo };

struct SirOptions {
  Sampler sampler = Sampler::rqmc;
  ScrambleScheme scheme = ScrambleScheme::owen_nested;
  int hilbert_order = 31;
};

/// N^-1 sum_n f(F_{h,N}^-1(x2_n)), with an s-dim scrambled Sobol' set for
/// the proposal draws and an independent 1-dim one for the resampling.
double sir_estimate(const SirProblem& prob, std::size_t N, std::uint64_t seed, const SirOptions& opt = {});

}  // namespace rqmc
