#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rqmc/point_set.hpp"
#include "rqmc/rng.hpp"

namespace rqmc {

enum class ScrambleScheme { owen_nested, linear_matousek };

std::string to_string(ScrambleScheme scheme);
ScrambleScheme parse_scramble_scheme(const std::string& name);

/// Seed and scheme of one randomization. All random choices are derived from
/// (seed, dimension, tree node), so the state is immutable and scrambling is
/// independent of evaluation order.
class ScrambleState {
 public:
  explicit ScrambleState(std::uint64_t seed, ScrambleScheme scheme = ScrambleScheme::owen_nested)
      : seed_(seed), scheme_(scheme) {}

  std::uint64_t seed() const noexcept { return seed_; }
  ScrambleScheme scheme() const noexcept { return scheme_; }

  std::uint64_t dimension_key(int j) const noexcept { return rng::derive(seed_, static_cast<std::uint64_t>(j)); }

  /// Two 32-bit keys for the base-2 Owen tree of coordinate j.
  std::uint32_t base2_key0(int j) const noexcept { return static_cast<std::uint32_t>(dimension_key(j)); }
  std::uint32_t base2_key1(int j) const noexcept { return static_cast<std::uint32_t>(dimension_key(j) >> 32); }

 private:
  std::uint64_t seed_;
  ScrambleScheme scheme_;
};

/// Permutation of {0..b-1} at the Owen tree node of coordinate j reached by
/// the `depth_index` leading digits whose integer value is `prefix`.
std::vector<Digit> node_permutation(const ScrambleState& state, int j, int depth_index, std::uint64_t prefix, int base);

/// Scrambled copy of `ps` (same base, dim, count, depth and t_claim).
PointSet scramble(const PointSet& ps, const ScrambleState& state);

/// As scramble(), reusing `out`'s storage when the shapes match.
void scramble_into(const PointSet& ps, const ScrambleState& state, PointSet& out);

/// Digit-by-digit scrambling for any base and depth. scramble() produces the
/// same words through the word-level kernels whenever those apply.
PointSet scramble_reference(const PointSet& ps, const ScrambleState& state);

/// Uniform variates appended below the last stored digit, one per (n, j).
class ResidualStream {
 public:
  explicit ResidualStream(std::uint64_t seed) : key_(rng::derive(seed, 0x7265736964ULL)) {}

  double operator()(std::size_t n, int j) const noexcept {
    return rng::to_unit_open(rng::mix64(rng::derive(key_, static_cast<std::uint64_t>(j)) ^ rng::mix64(n)));
  }

 private:
  std::uint64_t key_;
};

/// (word + u) / base^depth, kept strictly below 1.
double point_value(const PointSet& ps, std::size_t n, int j, double u);
double point_value(const PointSet& ps, std::size_t n, int j, const ResidualStream& residual);

/// All coordinates as doubles, column-major like the word storage.
void unit_values(const PointSet& ps, const ResidualStream& residual, std::span<double> out);
std::vector<double> unit_values(const PointSet& ps, const ResidualStream& residual);

}  // namespace rqmc
