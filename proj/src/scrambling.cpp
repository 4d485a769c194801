#include "rqmc/scrambling.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "rqmc/error.hpp"
#include "rqmc/kernels.hpp"

namespace rqmc {

namespace {

constexpr std::uint64_t kLinearStream = 0x4c494e454152ULL;

std::uint64_t node_key(int depth_index, std::uint64_t prefix) {
  return (prefix << 6) | static_cast<std::uint64_t>(depth_index);
}

std::vector<Digit> derive_permutation(std::uint64_t dim_key, int depth_index, std::uint64_t prefix, int base) {
  std::vector<Digit> perm(static_cast<std::size_t>(base));
  std::iota(perm.begin(), perm.end(), Digit{0});
  rng::CounterStream stream(rng::derive(dim_key, node_key(depth_index, prefix)));
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[stream.below(i + 1)]);
  return perm;
}

// Lower-triangular digit matrix and shift of one coordinate. Row i holds
// L[i][0..i-1] followed by the non-zero diagonal entry.
struct LinearScramble {
  std::vector<std::vector<Digit>> rows;
  std::vector<Digit> shift;
};

LinearScramble derive_linear(const ScrambleState& state, int j, int base, int depth) {
  rng::CounterStream stream(rng::derive(state.dimension_key(j), kLinearStream));
  const auto b = static_cast<std::uint64_t>(base);
  LinearScramble ls;
  ls.rows.resize(static_cast<std::size_t>(depth));
  ls.shift.resize(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    auto& row = ls.rows[static_cast<std::size_t>(i)];
    row.resize(static_cast<std::size_t>(i) + 1);
    row[static_cast<std::size_t>(i)] = static_cast<Digit>(1 + stream.below(b - 1));
    for (int k = 0; k < i; ++k) row[static_cast<std::size_t>(k)] = static_cast<Digit>(stream.below(b));
    ls.shift[static_cast<std::size_t>(i)] = static_cast<Digit>(stream.below(b));
  }
  return ls;
}

void scramble_column_generic(const PointSet& ps, const ScrambleState& state, int j, std::span<std::uint64_t> out) {
  const int b = ps.base();
  const int depth = ps.depth();
  const auto ub = static_cast<std::uint64_t>(b);
  const auto col = ps.column(j);
  std::vector<Digit> in_digits(static_cast<std::size_t>(depth));

  if (state.scheme() == ScrambleScheme::owen_nested) {
    // Permutations are pure functions of the node, so the cache only saves
    // recomputation within this column.
    std::unordered_map<std::uint64_t, std::vector<Digit>> cache;
    const std::uint64_t dim_key = state.dimension_key(j);
    const std::uint32_t k0 = state.base2_key0(j);
    const std::uint32_t k1 = state.base2_key1(j);
    for (std::size_t n = 0; n < ps.count(); ++n) {
      std::uint64_t w = col[n];
      for (int i = depth - 1; i >= 0; --i, w /= ub) in_digits[static_cast<std::size_t>(i)] = static_cast<Digit>(w % ub);
      std::uint64_t prefix = 0;
      std::uint64_t result = 0;
      for (int i = 0; i < depth; ++i) {
        const Digit a = in_digits[static_cast<std::size_t>(i)];
        Digit y;
        if (b == 2) {
          const auto node = static_cast<std::uint32_t>((std::uint64_t{1} << i) | prefix);
          y = a ^ kernels::owen_node_bit(node, k0, k1);
        } else {
          auto [it, inserted] = cache.try_emplace(node_key(i, prefix));
          if (inserted) it->second = derive_permutation(dim_key, i, prefix, b);
          y = it->second[a];
        }
        result = result * ub + y;
        prefix = prefix * ub + a;
      }
      out[n] = result;
    }
    return;
  }

  const LinearScramble ls = derive_linear(state, j, b, depth);
  for (std::size_t n = 0; n < ps.count(); ++n) {
    std::uint64_t w = col[n];
    for (int i = depth - 1; i >= 0; --i, w /= ub) in_digits[static_cast<std::size_t>(i)] = static_cast<Digit>(w % ub);
    std::uint64_t result = 0;
    for (int i = 0; i < depth; ++i) {
      const auto& row = ls.rows[static_cast<std::size_t>(i)];
      std::uint64_t acc = ls.shift[static_cast<std::size_t>(i)];
      for (int k = 0; k <= i; ++k) acc += static_cast<std::uint64_t>(row[static_cast<std::size_t>(k)]) * in_digits[static_cast<std::size_t>(k)];
      result = result * ub + acc % ub;
    }
    out[n] = result;
  }
}

void scramble_column_linear_base2(const PointSet& ps, const ScrambleState& state, int j, std::span<std::uint64_t> out) {
  const LinearScramble ls = derive_linear(state, j, 2, 32);
  std::uint32_t masks[32];
  std::uint32_t shift = 0;
  for (int i = 0; i < 32; ++i) {
    std::uint32_t m = 0;
    const auto& row = ls.rows[static_cast<std::size_t>(i)];
    for (int k = 0; k <= i; ++k)
      if (row[static_cast<std::size_t>(k)]) m |= 1U << (31 - k);
    masks[i] = m;
    shift |= static_cast<std::uint32_t>(ls.shift[static_cast<std::size_t>(i)]) << (31 - i);
  }
  const auto col = ps.column(j);
  for (std::size_t n = 0; n < ps.count(); ++n) {
    const auto x = static_cast<std::uint32_t>(col[n]);
    std::uint32_t y = 0;
    for (int i = 0; i < 32; ++i) y |= static_cast<std::uint32_t>(std::popcount(masks[i] & x) & 1) << (31 - i);
    out[n] = y ^ shift;
  }
}

}  // namespace

std::string to_string(ScrambleScheme scheme) {
  return scheme == ScrambleScheme::owen_nested ? "owen" : "linear";
}

ScrambleScheme parse_scramble_scheme(const std::string& name) {
  if (name == "owen" || name == "owen_nested") return ScrambleScheme::owen_nested;
  if (name == "linear" || name == "matousek" || name == "linear_matousek") return ScrambleScheme::linear_matousek;
  throw Error("unknown scramble scheme '" + name + "'");
}

std::vector<Digit> node_permutation(const ScrambleState& state, int j, int depth_index, std::uint64_t prefix, int base) {
  require_base(base);
  if (base == 2) {
    const auto node = static_cast<std::uint32_t>((std::uint64_t{1} << depth_index) | prefix);
    const Digit flip = kernels::owen_node_bit(node, state.base2_key0(j), state.base2_key1(j));
    return {flip, static_cast<Digit>(1 - flip)};
  }
  return derive_permutation(state.dimension_key(j), depth_index, prefix, base);
}

PointSet scramble_reference(const PointSet& ps, const ScrambleState& state) {
  if (ps.count() == 0) throw Error("cannot scramble an empty point set");
  PointSet out(ps.base(), ps.dim(), ps.count(), ps.depth(), ps.t_claim());
  for (int j = 0; j < ps.dim(); ++j) scramble_column_generic(ps, state, j, out.column(j));
  return out;
}

void scramble_into(const PointSet& ps, const ScrambleState& state, PointSet& out) {
  if (ps.count() == 0) throw Error("cannot scramble an empty point set");
  if (out.base() != ps.base() || out.dim() != ps.dim() || out.count() != ps.count() || out.depth() != ps.depth())
    out = PointSet(ps.base(), ps.dim(), ps.count(), ps.depth());
  out.set_t_claim(ps.t_claim());
  const bool word_kernels = ps.base() == 2 && ps.depth() == 32;
  std::vector<std::uint32_t> in32, out32;
  for (int j = 0; j < ps.dim(); ++j) {
    auto dst = out.column(j);
    if (!word_kernels) {
      scramble_column_generic(ps, state, j, dst);
    } else if (state.scheme() == ScrambleScheme::linear_matousek) {
      scramble_column_linear_base2(ps, state, j, dst);
    } else {
      const auto src = ps.column(j);
      in32.assign(src.begin(), src.end());
      out32.resize(in32.size());
      kernels::owen_scramble_base2(in32, out32, state.base2_key0(j), state.base2_key1(j));
      std::copy(out32.begin(), out32.end(), dst.begin());
    }
  }
}

PointSet scramble(const PointSet& ps, const ScrambleState& state) {
  PointSet out;
  scramble_into(ps, state, out);
  return out;
}

double point_value(const PointSet& ps, std::size_t n, int j, double u) {
  if (n >= ps.count() || j < 0 || j >= ps.dim()) throw Error("point index out of range");
  const double v = (static_cast<double>(ps.word(n, j)) + u) * (1.0 / static_cast<double>(ps.scale()));
  return v < 1.0 ? v : std::nextafter(1.0, 0.0);
}

double point_value(const PointSet& ps, std::size_t n, int j, const ResidualStream& residual) {
  return point_value(ps, n, j, residual(n, j));
}

void unit_values(const PointSet& ps, const ResidualStream& residual, std::span<double> out) {
  if (out.size() < ps.words().size()) throw Error("span too small");
  const double inv = 1.0 / static_cast<double>(ps.scale());
  const double below_one = std::nextafter(1.0, 0.0);
  for (int j = 0; j < ps.dim(); ++j) {
    const auto col = ps.column(j);
    double* dst = out.data() + static_cast<std::size_t>(j) * ps.count();
    for (std::size_t n = 0; n < ps.count(); ++n) {
      const double v = (static_cast<double>(col[n]) + residual(n, j)) * inv;
      dst[n] = v < 1.0 ? v : below_one;
    }
  }
}

std::vector<double> unit_values(const PointSet& ps, const ResidualStream& residual) {
  std::vector<double> out(ps.words().size());
  unit_values(ps, residual, out);
  return out;
}

}  // namespace rqmc
