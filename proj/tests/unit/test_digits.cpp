#include "doctest.h"

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "rqmc/digits.hpp"
#include "rqmc/error.hpp"

using namespace rqmc;

TEST_CASE("radical inverse examples") {
  CHECK(radical_inverse(0, 2, 8) == 0.0);
  CHECK(radical_inverse(1, 2, 8) == 0.5);
  CHECK(radical_inverse(5, 2, 8) == 0.625);
  CHECK_THROWS_WITH_AS(radical_inverse(256, 2, 8), doctest::Contains("digit overflow"), Error);
  CHECK_NOTHROW(radical_inverse(255, 2, 8));
}

TEST_CASE("radical inverse matches exact fractions") {
  for (int b : {2, 3, 5, 7, 11}) {
    for (std::uint64_t n = 0; n < 5000; ++n) {
      const auto [num, den] = oracle::radical_inverse_fraction(n, static_cast<std::uint64_t>(b));
      CHECK(radical_inverse(n, b, default_depth(b)) == static_cast<double>(num) / static_cast<double>(den));
    }
  }
}

TEST_CASE("radical inverse is a bijection onto the grid") {
  for (int b : {2, 3, 5}) {
    const int M = b == 2 ? 10 : (b == 3 ? 6 : 4);
    const std::uint64_t total = ipow(static_cast<std::uint64_t>(b), M);
    std::set<std::uint64_t> seen;
    for (std::uint64_t n = 0; n < total; ++n) {
      const double x = radical_inverse(n, b, M);
      const auto j = static_cast<std::uint64_t>(std::llround(x * static_cast<double>(total)));
      REQUIRE(x == static_cast<double>(j) / static_cast<double>(total));
      seen.insert(j);
    }
    CHECK(seen.size() == total);
    CHECK(*seen.rbegin() == total - 1);
  }
}

TEST_CASE("expand_integer examples") {
  auto e = expand_integer(13, 2);
  CHECK(e.coefficients == std::vector<Digit>{1, 0, 1, 1});
  CHECK(e.k() == 3);
  e = expand_integer(13, 3);
  CHECK(e.coefficients == std::vector<Digit>{1, 1, 1});
  CHECK(e.k() == 2);
  e = expand_integer(8, 2);
  CHECK(e.coefficients == std::vector<Digit>{0, 0, 0, 1});
  CHECK(e.k() == 3);
  CHECK_THROWS_WITH_AS(expand_integer(0, 2), doctest::Contains("empty expansion"), Error);
}

TEST_CASE("expand_integer round trip up to 1e6") {
  for (int b : {2, 3, 5, 7}) {
    bool ok = true;
    for (std::uint64_t n = 1; n <= 1000000; ++n) {
      const auto e = expand_integer(n, b);
      std::uint64_t acc = 0, p = 1;
      for (Digit a : e.coefficients) {
        acc += a * p;
        p *= static_cast<std::uint64_t>(b);
      }
      ok = ok && acc == n && e.coefficients.back() != 0 && e.value() == n;
    }
    CHECK(ok);
  }
}

TEST_CASE("digit value conversions") {
  CHECK(digits_to_value({2, {1, 1}}) == 0.75);
  CHECK(value_to_digits(0.625, 2, 3).digits == std::vector<Digit>{1, 0, 1});
  // floor(x 3^5) / 3^5 = 81/243 for x just above 1/3. The double nearest 1/3
  // lies below it, so the exact floor there is 80/243.
  const auto d = value_to_digits(std::nextafter(1.0 / 3.0, 1.0), 3, 5);
  CHECK(digits_to_value(d) == 81.0 / 243.0);
  CHECK(d.digits == std::vector<Digit>{1, 0, 0, 0, 0});
  CHECK(digits_to_value(value_to_digits(1.0 / 3.0, 3, 5)) == 80.0 / 243.0);
  CHECK_THROWS_AS(value_to_digits(1.0, 2, 4), Error);
  CHECK_THROWS_AS(value_to_digits(-0.1, 2, 4), Error);
}

namespace {
// floor(x * scale) in exact integer arithmetic: x = mant * 2^-k.
std::uint64_t exact_floor(double x, std::uint64_t scale) {
  if (x == 0.0) return 0;
  int e = 0;
  const double fr = std::frexp(x, &e);
  const auto mant = static_cast<unsigned __int128>(std::ldexp(fr, 53));
  const int k = 53 - e;
  return static_cast<std::uint64_t>((mant * scale) >> k);
}
}  // namespace

TEST_CASE("round trip equals the integer floor") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int b : {2, 3, 5, 7}) {
    for (int M : {1, 3, 8, 12}) {
      const double scale = static_cast<double>(ipow(static_cast<std::uint64_t>(b), M));
      for (int r = 0; r < 200; ++r) {
        const double x = u(gen);
        const auto want = exact_floor(x, static_cast<std::uint64_t>(scale));
        const auto d = value_to_digits(x, b, M);
        CHECK(digits_to_word(d) == want);
        CHECK(digits_to_value(d) == static_cast<double>(want) / scale);
      }
    }
  }
}

TEST_CASE("digits_to_value is monotone in lexicographic order") {
  const int b = 3, M = 5;
  std::vector<DigitVector> all;
  for (std::uint64_t w = 0; w < ipow(3, M); ++w) all.push_back(word_to_digits(w, b, M));
  std::sort(all.begin(), all.end(), [](const DigitVector& x, const DigitVector& y) { return x.digits < y.digits; });
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(digits_to_value(all[i - 1]) < digits_to_value(all[i]));
}

TEST_CASE("word helpers and depths") {
  CHECK(default_depth(2) == 32);
  CHECK(default_depth(3) == 21);
  CHECK(default_depth(5) == 14);
  const DigitVector d{5, {4, 0, 3}};
  CHECK(digits_to_word(d) == 4 * 25 + 3);
  CHECK(word_to_digits(103, 5, 3).digits == d.digits);
  CHECK_THROWS_AS(require_base(1), Error);
  CHECK_THROWS_AS(ipow(2, 64), Error);
  CHECK(digit_count(0, 2) == 0);
  CHECK(digit_count(8, 2) == 4);
}
