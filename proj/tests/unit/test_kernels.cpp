#include "doctest.h"

#include <cstring>
#include <random>

#include "rqmc/kernels.hpp"

using namespace rqmc::kernels;

namespace {

// Bit-level reference of Owen base-2 scrambling, written out per digit.
std::uint32_t owen_reference(std::uint32_t x, std::uint32_t k0, std::uint32_t k1) {
  std::uint32_t y = 0;
  for (int i = 0; i < 32; ++i) {
    const std::uint32_t prefix = i == 0 ? 0U : x >> (32 - i);
    const std::uint32_t node = (i == 0 ? 1U : (1U << i)) | prefix;
    const std::uint32_t digit = (x >> (31 - i)) & 1U;
    y |= (digit ^ owen_node_bit(node, k0, k1)) << (31 - i);
  }
  return y;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("isa queries") {
  CHECK(isa_available(Isa::scalar));
  CHECK(to_string(Isa::scalar) == "scalar");
  {
    ScopedIsa s(Isa::scalar);
    CHECK(active_isa() == Isa::scalar);
  }
  MESSAGE("avx2 available: " << isa_available(Isa::avx2));
}

TEST_CASE("owen kernel matches the bitwise reference") {
  std::mt19937 gen(1);
  for (std::size_t len : {0U, 1U, 7U, 8U, 9U, 63U, 1000U}) {
    std::vector<std::uint32_t> in(len), out_s(len), out_v(len);
    for (auto& x : in) x = gen();
    const std::uint32_t k0 = gen(), k1 = gen();
    scalar::owen_scramble_base2(in, out_s, k0, k1);
    for (std::size_t i = 0; i < len; ++i) REQUIRE(out_s[i] == owen_reference(in[i], k0, k1));
    if (isa_available(Isa::avx2)) {
      avx2::owen_scramble_base2(in, out_v, k0, k1);
      CHECK(out_v == out_s);
    }
  }
}

TEST_CASE("evaluate kernels are bit-identical across variants") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ReductionParams params[] = {
      {Reduction::sum, 0.0, 1.0},
      {Reduction::hinge, 1.5, 1.0},
      {Reduction::indicator, 3.0, 1.0},
      {Reduction::centered_product, 0.0, 1728.0},
  };
  for (int dim : {1, 2, 3, 6, 13}) {
    for (std::size_t count : {1U, 3U, 4U, 5U, 17U, 1024U}) {
      std::vector<double> cols(count * static_cast<std::size_t>(dim));
      for (auto& x : cols) x = u(gen);
      for (const auto& p : params) {
        std::vector<double> ref(count), a(count), b(count);
        // Reference: straightforward per-point loop in the documented order.
        for (std::size_t n = 0; n < count; ++n) {
          double acc = p.kind == Reduction::centered_product ? 1.0 : 0.0;
          for (int j = 0; j < dim; ++j) {
            const double x = cols[static_cast<std::size_t>(j) * count + n];
            acc = p.kind == Reduction::centered_product ? acc * (x - 0.5) : acc + x;
          }
          switch (p.kind) {
            case Reduction::sum: ref[n] = acc; break;
            case Reduction::hinge: ref[n] = std::max(acc - p.threshold, 0.0); break;
            case Reduction::indicator: ref[n] = acc > p.threshold ? 1.0 : 0.0; break;
            case Reduction::centered_product: ref[n] = acc * p.scale; break;
          }
        }
        scalar::evaluate(p, cols, count, dim, a);
        for (std::size_t n = 0; n < count; ++n) REQUIRE(same_bits(a[n], ref[n]));
        if (isa_available(Isa::avx2)) {
          avx2::evaluate(p, cols, count, dim, b);
          for (std::size_t n = 0; n < count; ++n) REQUIRE(same_bits(b[n], ref[n]));
        }
      }
    }
  }
}

TEST_CASE("dispatch honours the active variant") {
  std::vector<std::uint32_t> in(100), o1(100), o2(100);
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = static_cast<std::uint32_t>(i * 2654435761U);
  {
    ScopedIsa s(Isa::scalar);
    owen_scramble_base2(in, o1, 3, 4);
  }
  owen_scramble_base2(in, o2, 3, 4);
  CHECK(o1 == o2);
  std::vector<std::uint32_t> tiny(10);
  CHECK_THROWS(owen_scramble_base2(in, tiny, 3, 4));
}
