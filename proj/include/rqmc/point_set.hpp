#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rqmc/digits.hpp"

namespace rqmc {

/// N points in [0,1)^s held as base-b digit words: coordinate j of point n is
/// word(n, j) / base^depth, with the digits of the word read most significant
/// first. Words are stored column-major so every coordinate is contiguous.
class PointSet {
 public:
  PointSet() = default;
  PointSet(int base, int dim, std::size_t count, int depth, std::optional<int> t_claim = std::nullopt);
  PointSet(int base, int dim, std::size_t count, int depth, std::vector<std::uint64_t> words,
           std::optional<int> t_claim = std::nullopt);

  int base() const noexcept { return base_; }
  int dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return count_; }
  int depth() const noexcept { return depth_; }
  std::optional<int> t_claim() const noexcept { return t_claim_; }
  void set_t_claim(std::optional<int> t) noexcept { t_claim_ = t; }

  /// base^depth, the number of distinct words per coordinate.
  std::uint64_t scale() const noexcept { return scale_; }

  std::uint64_t word(std::size_t n, int j) const { return words_[index(n, j)]; }
  void set_word(std::size_t n, int j, std::uint64_t w);

  std::span<const std::uint64_t> column(int j) const;
  std::span<std::uint64_t> column(int j);
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Digit i (0 = most significant) of coordinate j of point n.
  Digit digit(std::size_t n, int j, int i) const;
  DigitVector digits(std::size_t n, int j) const;

  /// Leading `d` digits of coordinate j as an integer in [0, base^d).
  std::uint64_t leading(std::size_t n, int j, int d) const;

  /// Truncated coordinate value word / base^depth (no residual).
  double value(std::size_t n, int j) const;

  /// Points [begin, end) as a new set; t_claim is dropped because an
  /// arbitrary slice need not be a net.
  PointSet slice(std::size_t begin, std::size_t end) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t index(std::size_t n, int j) const noexcept {
    return static_cast<std::size_t>(j) * count_ + n;
  }

  int base_ = 2;
  int dim_ = 0;
  std::size_t count_ = 0;
  int depth_ = 0;
  std::uint64_t scale_ = 1;
  std::optional<int> t_claim_;
  std::vector<std::uint64_t> words_;
};

}  // namespace rqmc
