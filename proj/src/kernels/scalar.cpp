#include <algorithm>

#include "rqmc/kernels.hpp"

namespace rqmc::kernels::scalar {

void owen_scramble_base2(std::span<const std::uint32_t> in, std::span<std::uint32_t> out, std::uint32_t k0,
                         std::uint32_t k1) {
  for (std::size_t n = 0; n < in.size(); ++n) {
    const std::uint32_t x = in[n];
    std::uint32_t y = x;
    for (int i = 0; i < 32; ++i) {
      const auto prefix = static_cast<std::uint32_t>(static_cast<std::uint64_t>(x) >> (32 - i));
      const std::uint32_t node = (1U << i) | prefix;
      y ^= owen_node_bit(node, k0, k1) << (31 - i);
    }
    out[n] = y;
  }
}

void evaluate(const ReductionParams& p, std::span<const double> cols, std::size_t count, int dim,
              std::span<double> out) {
  const auto column = [&](int j) { return cols.data() + static_cast<std::size_t>(j) * count; };
  switch (p.kind) {
    case Reduction::sum:
    case Reduction::hinge:
    case Reduction::indicator: {
      std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(count), 0.0);
      for (int j = 0; j < dim; ++j) {
        const double* x = column(j);
        for (std::size_t n = 0; n < count; ++n) out[n] += x[n];
      }
      if (p.kind == Reduction::hinge) {
        for (std::size_t n = 0; n < count; ++n) out[n] = std::max(out[n] - p.threshold, 0.0);
      } else if (p.kind == Reduction::indicator) {
        for (std::size_t n = 0; n < count; ++n) out[n] = out[n] > p.threshold ? 1.0 : 0.0;
      }
      break;
    }
    case Reduction::centered_product: {
      std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(count), 1.0);
      for (int j = 0; j < dim; ++j) {
        const double* x = column(j);
        for (std::size_t n = 0; n < count; ++n) out[n] *= x[n] - 0.5;
      }
      for (std::size_t n = 0; n < count; ++n) out[n] *= p.scale;
      break;
    }
  }
}

}  // namespace rqmc::kernels::scalar
