#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// where the build and CPU allow it, an AVX2 version chosen at runtime. The
// variants are bit-identical: same operation order, no FMA contraction.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "rqmc/rng.hpp"

namespace rqmc::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Compiled in and supported by the running CPU.
bool isa_available(Isa isa) noexcept;

/// The variant used by the dispatching entry points. Defaults to the best
/// available one; the RQMC_ISA environment variable (scalar|avx2) or
/// set_active_isa() override it.
Isa active_isa() noexcept;
void set_active_isa(Isa isa);

class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

/// Random bit of the binary permutation at one node of the Owen tree. A node
/// at depth i with digit prefix p (i digits) is encoded as (1 << i) | p.
constexpr std::uint32_t owen_node_bit(std::uint32_t node, std::uint32_t k0, std::uint32_t k1) noexcept {
  return rng::hash32(rng::hash32(node ^ k0) + k1) >> 31;
}

/// Equal-weight integrand families evaluated over column-major coordinates
/// (`dim` columns of `count` values each).
enum class Reduction {
  sum,                // sum_j x_j
  hinge,              // max(sum_j x_j - c, 0)
  indicator,          // 1 if sum_j x_j > c else 0
  centered_product,   // scale * prod_j (x_j - 0.5)
};

struct ReductionParams {
  Reduction kind = Reduction::sum;
  double threshold = 0.0;
  double scale = 1.0;
};

// Dispatching entry points.

/// Owen nested scrambling of 32-digit base-2 words: digit i of each word is
/// flipped when owen_node_bit of its original i-digit prefix is set.
void owen_scramble_base2(std::span<const std::uint32_t> in, std::span<std::uint32_t> out, std::uint32_t k0,
                         std::uint32_t k1);

void evaluate(const ReductionParams& p, std::span<const double> cols, std::size_t count, int dim,
              std::span<double> out);

namespace scalar {
void owen_scramble_base2(std::span<const std::uint32_t> in, std::span<std::uint32_t> out, std::uint32_t k0,
                         std::uint32_t k1);
void evaluate(const ReductionParams& p, std::span<const double> cols, std::size_t count, int dim,
              std::span<double> out);
}  // namespace scalar

namespace avx2 {
// Only callable when isa_available(Isa::avx2).
void owen_scramble_base2(std::span<const std::uint32_t> in, std::span<std::uint32_t> out, std::uint32_t k0,
                         std::uint32_t k1);
void evaluate(const ReductionParams& p, std::span<const double> cols, std::size_t count, int dim,
              std::span<double> out);
}  // namespace avx2

}  // namespace rqmc::kernels
