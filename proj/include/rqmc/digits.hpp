#pragma once

#include <cstdint>
#include <vector>

namespace rqmc {

using Digit = std::uint32_t;

/// Fractional expansion x = sum_i digits[i] * base^-(i+1), most significant
/// digit first.
struct DigitVector {
  int base = 2;
  std::vector<Digit> digits;
};

/// Integer expansion n = sum_m coefficients[m] * base^m. Coefficients are
/// stored least significant first, the opposite of DigitVector.
struct BaseExpansion {
  int base = 2;
  std::vector<Digit> coefficients;

  /// Index of the leading (non-zero) coefficient, floor(log_base n).
  int k() const noexcept { return static_cast<int>(coefficients.size()) - 1; }
  std::uint64_t value() const;
};

void require_base(int base);

/// b^e, throwing when the result does not fit in 64 bits.
std::uint64_t ipow(std::uint64_t b, int e);

/// Number of base-b digits used to represent points: 32 for base 2 and
/// ceil(32 ln 2 / ln b) otherwise, so every point carries at least 32 bits.
int default_depth(int base);

/// Largest depth whose digit word base^depth still fits in 64 bits.
int max_depth(int base);

/// Number of base-b digits of n (0 for n = 0).
int digit_count(std::uint64_t n, int base);

/// Van der Corput radical inverse of n truncated to `depth` digits.
/// Throws "digit overflow" when n has more than `depth` digits.
double radical_inverse(std::uint64_t n, int base, int depth);

/// Integer expansion of n >= 1; throws "empty expansion" for n = 0.
BaseExpansion expand_integer(std::uint64_t n, int base);

double digits_to_value(const DigitVector& d);

/// First `depth` digits of x in [0,1): the expansion of floor(x * base^depth).
DigitVector value_to_digits(double x, int base, int depth);

/// A digit word packs a DigitVector of length `depth` as the integer
/// sum_i d[i] * base^(depth-1-i) = floor(x * base^depth).
std::uint64_t digits_to_word(const DigitVector& d);
DigitVector word_to_digits(std::uint64_t word, int base, int depth);

}  // namespace rqmc
