#include <atomic>
#include <cstdlib>
#include <string>

#include "rqmc/error.hpp"
#include "rqmc/kernels.hpp"

namespace rqmc::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(RQMC_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  const Isa best = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("RQMC_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && best == Isa::avx2) return Isa::avx2;
  }
  return best;
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) throw Error("instruction set " + std::string(to_string(isa)) + " not available");
  active().store(isa, std::memory_order_relaxed);
}

void owen_scramble_base2(std::span<const std::uint32_t> in, std::span<std::uint32_t> out, std::uint32_t k0,
                         std::uint32_t k1) {
  if (out.size() < in.size()) throw Error("output span too small");
#if defined(RQMC_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::owen_scramble_base2(in, out, k0, k1);
#endif
  scalar::owen_scramble_base2(in, out, k0, k1);
}

void evaluate(const ReductionParams& p, std::span<const double> cols, std::size_t count, int dim,
              std::span<double> out) {
  if (cols.size() < count * static_cast<std::size_t>(dim) || out.size() < count) throw Error("span too small");
#if defined(RQMC_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::evaluate(p, cols, count, dim, out);
#endif
  scalar::evaluate(p, cols, count, dim, out);
}

#if !defined(RQMC_HAVE_AVX2)
namespace avx2 {
void owen_scramble_base2(std::span<const std::uint32_t> in, std::span<std::uint32_t> out, std::uint32_t k0,
                         std::uint32_t k1) {
  scalar::owen_scramble_base2(in, out, k0, k1);
}
void evaluate(const ReductionParams& p, std::span<const double> cols, std::size_t count, int dim,
              std::span<double> out) {
  scalar::evaluate(p, cols, count, dim, out);
}
}  // namespace avx2
#endif

}  // namespace rqmc::kernels
