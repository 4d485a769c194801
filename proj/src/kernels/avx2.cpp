#include <immintrin.h>

#include <algorithm>

#include "rqmc/kernels.hpp"

namespace rqmc::kernels::avx2 {

namespace {

inline __m256i hash32x8(__m256i x) {
  x = _mm256_xor_si256(x, _mm256_srli_epi32(x, 16));
  x = _mm256_mullo_epi32(x, _mm256_set1_epi32(0x7feb352d));
  x = _mm256_xor_si256(x, _mm256_srli_epi32(x, 15));
  x = _mm256_mullo_epi32(x, _mm256_set1_epi32(static_cast<int>(0x846ca68bU)));
  x = _mm256_xor_si256(x, _mm256_srli_epi32(x, 16));
  return x;
}

}  // namespace

void owen_scramble_base2(std::span<const std::uint32_t> in, std::span<std::uint32_t> out, std::uint32_t k0,
                         std::uint32_t k1) {
  const std::size_t n = in.size();
  const std::size_t vec_end = n - n % 8;
  const __m256i key0 = _mm256_set1_epi32(static_cast<int>(k0));
  const __m256i key1 = _mm256_set1_epi32(static_cast<int>(k1));
  for (std::size_t base = 0; base < vec_end; base += 8) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in.data() + base));
    __m256i y = x;
    for (int i = 0; i < 32; ++i) {
      // srlv yields zero for a shift count of 32, matching the scalar 64-bit shift.
      const __m256i prefix = _mm256_srlv_epi32(x, _mm256_set1_epi32(32 - i));
      const __m256i node = _mm256_or_si256(prefix, _mm256_set1_epi32(static_cast<int>(1U << i)));
      __m256i h = hash32x8(_mm256_xor_si256(node, key0));
      h = hash32x8(_mm256_add_epi32(h, key1));
      const __m256i bit = _mm256_sll_epi32(_mm256_srli_epi32(h, 31), _mm_cvtsi32_si128(31 - i));
      y = _mm256_xor_si256(y, bit);
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + base), y);
  }
  if (vec_end < n) scalar::owen_scramble_base2(in.subspan(vec_end), out.subspan(vec_end), k0, k1);
}

void evaluate(const ReductionParams& p, std::span<const double> cols, std::size_t count, int dim,
              std::span<double> out) {
  const std::size_t vec_end = count - count % 4;
  const auto column = [&](int j) { return cols.data() + static_cast<std::size_t>(j) * count; };
  const __m256d threshold = _mm256_set1_pd(p.threshold);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d scale = _mm256_set1_pd(p.scale);
  for (std::size_t n = 0; n < vec_end; n += 4) {
    __m256d acc;
    if (p.kind == Reduction::centered_product) {
      acc = one;
      for (int j = 0; j < dim; ++j) acc = _mm256_mul_pd(acc, _mm256_sub_pd(_mm256_loadu_pd(column(j) + n), half));
      acc = _mm256_mul_pd(acc, scale);
    } else {
      acc = zero;
      for (int j = 0; j < dim; ++j) acc = _mm256_add_pd(acc, _mm256_loadu_pd(column(j) + n));
      if (p.kind == Reduction::hinge) {
        acc = _mm256_max_pd(_mm256_sub_pd(acc, threshold), zero);
      } else if (p.kind == Reduction::indicator) {
        acc = _mm256_and_pd(_mm256_cmp_pd(acc, threshold, _CMP_GT_OQ), one);
      }
    }
    _mm256_storeu_pd(out.data() + n, acc);
  }
  // Tail lanes follow the reference operation order point by point.
  for (std::size_t n = vec_end; n < count; ++n) {
    double acc;
    if (p.kind == Reduction::centered_product) {
      acc = 1.0;
      for (int j = 0; j < dim; ++j) acc *= column(j)[n] - 0.5;
      acc *= p.scale;
    } else {
      acc = 0.0;
      for (int j = 0; j < dim; ++j) acc += column(j)[n];
      if (p.kind == Reduction::hinge) acc = std::max(acc - p.threshold, 0.0);
      else if (p.kind == Reduction::indicator) acc = acc > p.threshold ? 1.0 : 0.0;
    }
    out[n] = acc;
  }
}

}  // namespace rqmc::kernels::avx2
