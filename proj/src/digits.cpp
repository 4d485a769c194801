#include "rqmc/digits.hpp"

#include <cmath>
#include <limits>

#include "rqmc/error.hpp"

namespace rqmc {

void require_base(int base) {
  if (base < 2) throw Error("base must be at least 2");
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / b) throw Error("digit overflow");
    r *= b;
  }
  return r;
}

int max_depth(int base) {
  require_base(base);
  int depth = 0;
  std::uint64_t r = 1;
  const auto b = static_cast<std::uint64_t>(base);
  while (r <= std::numeric_limits<std::uint64_t>::max() / b) {
    r *= b;
    ++depth;
  }
  return depth;
}

int default_depth(int base) {
  require_base(base);
  if (base == 2) return 32;
  return static_cast<int>(std::ceil(32.0 * std::log(2.0) / std::log(static_cast<double>(base)) - 1e-12));
}

int digit_count(std::uint64_t n, int base) {
  require_base(base);
  int count = 0;
  while (n > 0) {
    n /= static_cast<std::uint64_t>(base);
    ++count;
  }
  return count;
}

std::uint64_t BaseExpansion::value() const {
  std::uint64_t v = 0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
    v = v * static_cast<std::uint64_t>(base) + *it;
  return v;
}

double radical_inverse(std::uint64_t n, int base, int depth) {
  require_base(base);
  const int k = digit_count(n, base);
  if (k > depth) throw Error("digit overflow");
  // reversed = sum_i d_i b^(k-1-i) with d_0 the least significant digit of n,
  // so the value is reversed / b^k.
  const auto b = static_cast<std::uint64_t>(base);
  unsigned __int128 reversed = 0;
  unsigned __int128 scale = 1;
  for (std::uint64_t m = n; m > 0; m /= b) {
    reversed = reversed * b + m % b;
    scale *= b;
  }
  // A single correctly rounded division whenever both operands are exact.
  if (scale <= (static_cast<unsigned __int128>(1) << 53)) return static_cast<double>(reversed) / static_cast<double>(scale);
  return static_cast<double>(static_cast<long double>(reversed) / static_cast<long double>(scale));
}

BaseExpansion expand_integer(std::uint64_t n, int base) {
  require_base(base);
  if (n == 0) throw Error("empty expansion");
  BaseExpansion e{base, {}};
  const auto b = static_cast<std::uint64_t>(base);
  for (; n > 0; n /= b) e.coefficients.push_back(static_cast<Digit>(n % b));
  return e;
}

double digits_to_value(const DigitVector& d) {
  require_base(d.base);
  // Horner from the least significant digit keeps the partial sum exact
  // whenever the result is representable.
  long double v = 0.0L;
  for (auto it = d.digits.rbegin(); it != d.digits.rend(); ++it) {
    if (*it >= static_cast<Digit>(d.base)) throw Error("digit out of range");
    v = (v + *it) / d.base;
  }
  return static_cast<double>(v);
}

DigitVector value_to_digits(double x, int base, int depth) {
  require_base(base);
  if (!(x >= 0.0 && x < 1.0)) throw Error("value outside [0,1)");
  if (depth < 1) throw Error("depth must be at least 1");
  const std::uint64_t scale = ipow(static_cast<std::uint64_t>(base), depth);
  auto word = static_cast<std::uint64_t>(std::floor(static_cast<long double>(x) * scale));
  if (word >= scale) word = scale - 1;
  return word_to_digits(word, base, depth);
}

std::uint64_t digits_to_word(const DigitVector& d) {
  require_base(d.base);
  std::uint64_t w = 0;
  const auto b = static_cast<std::uint64_t>(d.base);
  for (Digit digit : d.digits) {
    if (digit >= b) throw Error("digit out of range");
    if (w > (std::numeric_limits<std::uint64_t>::max() - digit) / b) throw Error("digit overflow");
    w = w * b + digit;
  }
  return w;
}

DigitVector word_to_digits(std::uint64_t word, int base, int depth) {
  require_base(base);
  DigitVector d{base, std::vector<Digit>(static_cast<std::size_t>(depth), 0)};
  const auto b = static_cast<std::uint64_t>(base);
  for (int i = depth - 1; i >= 0; --i) {
    d.digits[static_cast<std::size_t>(i)] = static_cast<Digit>(word % b);
    word /= b;
  }
  if (word != 0) throw Error("digit overflow");
  return d;
}

}  // namespace rqmc
