#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace rqmc {

/// Hilbert curve of [0,1]^d at resolution 2^(d p) cells, d in {1,2},
/// 1 <= p <= 31. The d = 2 curve starts in the cell at (0,0) and ends in the
/// cell at (1,0) (the classical "U" motif opening downwards).
struct HilbertOrder {
  int d = 2;
  int p = 16;
  void validate() const;
  std::uint64_t cells() const { return std::uint64_t{1} << (d * p); }
};

/// Rank of cell (x, y) along the curve, cells indexed 0..2^p-1 per axis.
std::uint64_t hilbert_xy_to_rank(std::uint32_t x, std::uint32_t y, int p);
void hilbert_rank_to_xy(std::uint64_t rank, int p, std::uint32_t& x, std::uint32_t& y);

/// Centre of the cell with rank floor(u 2^(d p)); u = 1 maps to the last cell.
std::array<double, 2> hilbert_map(double u, const HilbertOrder& ord);

/// Integer cell rank of x in [0,1)^d, boundaries left-closed.
std::uint64_t hilbert_rank(std::span<const double> x, const HilbertOrder& ord);

/// rank / 2^(d p).
double hilbert_inverse(std::span<const double> x, const HilbertOrder& ord);

}  // namespace rqmc
