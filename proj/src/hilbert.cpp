#include "rqmc/hilbert.hpp"

#include <algorithm>
#include <cmath>

#include "rqmc/error.hpp"

namespace rqmc {

namespace {

void rotate(std::uint32_t n, std::uint32_t& x, std::uint32_t& y, std::uint32_t rx, std::uint32_t ry) {
  if (ry == 0) {
    if (rx == 1) {
      x = n - 1 - x;
      y = n - 1 - y;
    }
    std::swap(x, y);
  }
}

std::uint32_t cell_index(double v, int p) {
  if (!(v >= 0.0)) v = 0.0;
  const double scaled = std::floor(std::ldexp(v, p));
  const double top = std::ldexp(1.0, p) - 1.0;
  return static_cast<std::uint32_t>(std::min(scaled, top));
}

}  // namespace

void HilbertOrder::validate() const {
  if (d != 1 && d != 2) throw Error("Hilbert curves are implemented for d in {1,2}");
  if (p < 1 || p > 31) throw Error("Hilbert order must lie in [1,31]");
}

std::uint64_t hilbert_xy_to_rank(std::uint32_t x, std::uint32_t y, int p) {
  const std::uint32_t n = 1U << p;
  std::uint64_t d = 0;
  for (std::uint32_t s = n >> 1; s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    rotate(n, x, y, rx, ry);
  }
  return d;
}

void hilbert_rank_to_xy(std::uint64_t rank, int p, std::uint32_t& x, std::uint32_t& y) {
  const std::uint32_t n = 1U << p;
  x = y = 0;
  std::uint64_t t = rank;
  for (std::uint32_t s = 1; s < n; s <<= 1) {
    const auto rx = static_cast<std::uint32_t>(1 & (t / 2));
    const auto ry = static_cast<std::uint32_t>(1 & (t ^ rx));
    rotate(s, x, y, rx, ry);
    x += s * rx;
    y += s * ry;
    t /= 4;
  }
}

std::array<double, 2> hilbert_map(double u, const HilbertOrder& ord) {
  ord.validate();
  const std::uint64_t cells = ord.cells();
  const double clamped = std::clamp(u, 0.0, 1.0);
  auto rank = static_cast<std::uint64_t>(std::floor(clamped * static_cast<double>(cells)));
  if (rank >= cells) rank = cells - 1;
  if (ord.d == 1) return {(static_cast<double>(rank) + 0.5) / static_cast<double>(cells), 0.0};
  std::uint32_t x = 0, y = 0;
  hilbert_rank_to_xy(rank, ord.p, x, y);
  const double side = std::ldexp(1.0, ord.p);
  return {(x + 0.5) / side, (y + 0.5) / side};
}

std::uint64_t hilbert_rank(std::span<const double> x, const HilbertOrder& ord) {
  ord.validate();
  if (static_cast<int>(x.size()) != ord.d) throw Error("dimension mismatch");
  if (ord.d == 1) return cell_index(x[0], ord.p);
  return hilbert_xy_to_rank(cell_index(x[0], ord.p), cell_index(x[1], ord.p), ord.p);
}

double hilbert_inverse(std::span<const double> x, const HilbertOrder& ord) {
  return static_cast<double>(hilbert_rank(x, ord)) / static_cast<double>(ord.cells());
}

}  // namespace rqmc
