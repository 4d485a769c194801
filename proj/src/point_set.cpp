#include "rqmc/point_set.hpp"

#include <string>

#include "rqmc/error.hpp"

namespace rqmc {

PointSet::PointSet(int base, int dim, std::size_t count, int depth, std::optional<int> t_claim)
    : PointSet(base, dim, count, depth, std::vector<std::uint64_t>(count * static_cast<std::size_t>(dim), 0),
               t_claim) {}

PointSet::PointSet(int base, int dim, std::size_t count, int depth, std::vector<std::uint64_t> words,
                   std::optional<int> t_claim)
    : base_(base), dim_(dim), count_(count), depth_(depth), t_claim_(t_claim), words_(std::move(words)) {
  require_base(base);
  if (dim < 1) throw Error("dimension must be at least 1");
  if (depth < 1 || depth > max_depth(base)) throw Error("unsupported digit depth " + std::to_string(depth));
  scale_ = ipow(static_cast<std::uint64_t>(base), depth);
  if (words_.size() != count * static_cast<std::size_t>(dim)) throw Error("word matrix does not match N x s");
  for (std::uint64_t w : words_)
    if (w >= scale_) throw Error("digit overflow");
}

void PointSet::set_word(std::size_t n, int j, std::uint64_t w) {
  if (w >= scale_) throw Error("digit overflow");
  words_[index(n, j)] = w;
}

std::span<const std::uint64_t> PointSet::column(int j) const {
  return std::span<const std::uint64_t>(words_).subspan(static_cast<std::size_t>(j) * count_, count_);
}

std::span<std::uint64_t> PointSet::column(int j) {
  return std::span<std::uint64_t>(words_).subspan(static_cast<std::size_t>(j) * count_, count_);
}

Digit PointSet::digit(std::size_t n, int j, int i) const {
  if (i < 0 || i >= depth_) throw Error("digit index out of range");
  std::uint64_t w = word(n, j);
  if (base_ == 2) return static_cast<Digit>((w >> (depth_ - 1 - i)) & 1U);
  const auto b = static_cast<std::uint64_t>(base_);
  for (int k = depth_ - 1; k > i; --k) w /= b;
  return static_cast<Digit>(w % b);
}

DigitVector PointSet::digits(std::size_t n, int j) const { return word_to_digits(word(n, j), base_, depth_); }

std::uint64_t PointSet::leading(std::size_t n, int j, int d) const {
  const std::uint64_t w = word(n, j);
  if (d >= depth_) return w;
  if (base_ == 2) return w >> (depth_ - d);
  return w / ipow(static_cast<std::uint64_t>(base_), depth_ - d);
}

double PointSet::value(std::size_t n, int j) const {
  return static_cast<double>(static_cast<long double>(word(n, j)) / static_cast<long double>(scale_));
}

PointSet PointSet::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > count_) throw Error("slice out of range");
  const std::size_t len = end - begin;
  std::vector<std::uint64_t> w(len * static_cast<std::size_t>(dim_));
  for (int j = 0; j < dim_; ++j)
    for (std::size_t n = 0; n < len; ++n) w[static_cast<std::size_t>(j) * len + n] = word(begin + n, j);
  return PointSet(base_, dim_, len, depth_, std::move(w));
}

}  // namespace rqmc
