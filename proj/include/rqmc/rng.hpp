#pragma once

#include <cstdint>
#include <limits>

namespace rqmc::rng {

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 32-bit avalanche hash (lowbias32). Used by the scrambling kernels, which
/// need a multiply that exists in every SIMD instruction set.
constexpr std::uint32_t hash32(std::uint32_t x) noexcept {
  x ^= x >> 16;
  x *= 0x7feb352dU;
  x ^= x >> 15;
  x *= 0x846ca68bU;
  x ^= x >> 16;
  return x;
}

/// Child key of `seed` for substream `stream`. Distinct streams of the same
/// seed are statistically independent; the result depends only on the pair.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc909ULL));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return derive(derive(seed, a), b);
}

/// Uniform on the open interval (0,1) with 53-bit resolution.
constexpr double to_unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Counter-based stream: the i-th draw is a pure function of (key, i), so a
/// stream can be split or replayed without sharing state.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterStream(std::uint64_t key, std::uint64_t start = 0) noexcept
      : key_(key), counter_(start) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return at(counter_++); }
  constexpr result_type at(std::uint64_t index) const noexcept { return mix64(key_ ^ mix64(index)); }

  /// Uniform draw in (0,1).
  constexpr double uniform() noexcept { return to_unit_open((*this)()); }

  /// Uniform integer in [0, bound) by multiply-shift.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace rqmc::rng
