#pragma once
// Test-only reference implementations. They deliberately share no code with
// the library beyond the data types, so agreement is evidence of correctness.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "rqmc/point_set.hpp"

namespace oracle {

/// Radical inverse as an exact fraction num / den.
inline std::pair<std::uint64_t, std::uint64_t> radical_inverse_fraction(std::uint64_t n, std::uint64_t b) {
  std::uint64_t num = 0, den = 1;
  while (n > 0) {
    num = num * b + n % b;
    den *= b;
    n /= b;
  }
  return {num, den};
}

/// Sobol' coordinate word computed from scratch: XOR of the direction
/// integers selected by the binary digits of n.
inline std::uint32_t sobol_direct(std::uint64_t n, const std::uint32_t* v) {
  std::uint32_t x = 0;
  for (int bit = 0; n > 0; ++bit, n >>= 1)
    if (n & 1U) x ^= v[bit];
  return x;
}

/// Compositions of `total` into `parts` non-negative integers.
inline std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(parts), 0);
  auto rec = [&](auto&& self, int j, int left) -> void {
    if (j == parts - 1) {
      cur[static_cast<std::size_t>(j)] = left;
      out.push_back(cur);
      return;
    }
    for (int d = 0; d <= left; ++d) {
      cur[static_cast<std::size_t>(j)] = d;
      self(self, j + 1, left - d);
    }
  };
  rec(rec, 0, total);
  return out;
}

/// Box occupancies at total depth D through integer division of the words:
/// a point lies in box a_j at depth d_j iff floor(word / b^(depth-d_j)) = a_j.
inline std::vector<std::map<std::vector<std::uint64_t>, std::uint64_t>> box_counts(const rqmc::PointSet& ps, int D) {
  std::vector<std::map<std::vector<std::uint64_t>, std::uint64_t>> all;
  const auto b = static_cast<std::uint64_t>(ps.base());
  for (const auto& d : compositions(D, ps.dim())) {
    std::map<std::vector<std::uint64_t>, std::uint64_t> counts;
    for (std::size_t n = 0; n < ps.count(); ++n) {
      std::vector<std::uint64_t> key;
      for (int j = 0; j < ps.dim(); ++j) {
        std::uint64_t div = 1;
        for (int e = 0; e < ps.depth() - d[static_cast<std::size_t>(j)]; ++e) div *= b;
        key.push_back(ps.word(n, j) / div);
      }
      ++counts[key];
    }
    all.push_back(std::move(counts));
  }
  return all;
}

inline std::uint64_t power(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

/// (t,m,s)-net property by brute force. Boxes missing from the map hold zero
/// points, which only satisfies the property when b^t = 0 (never).
inline bool is_net(const rqmc::PointSet& ps, int t, int m) {
  const auto b = static_cast<std::uint64_t>(ps.base());
  const std::uint64_t want = power(b, t);
  const auto per_comp = box_counts(ps, m - t);
  const auto comps = compositions(m - t, ps.dim());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    std::uint64_t boxes = 1;
    for (int d : comps[c]) boxes *= power(b, d);
    if (per_comp[c].size() != boxes) return false;
    for (const auto& [key, cnt] : per_comp[c])
      if (cnt != want) return false;
  }
  return true;
}

/// Upper-tail chi-square p-value of observed counts against equal cells.
inline double chi_square_uniform_p(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Kolmogorov-Smirnov statistic of a sample against U(0,1).
inline double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - x[i]);
    d = std::max(d, x[i] - static_cast<double>(i) / n);
  }
  return d;
}

/// Kolmogorov limiting survival function Q(x) = 2 sum (-1)^(k-1) exp(-2k^2x^2).
inline double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  double acc = 0.0;
  for (int k = 1; k <= 100; ++k) acc += ((k % 2) ? 2.0 : -2.0) * std::exp(-2.0 * k * k * x * x);
  return std::clamp(acc, 0.0, 1.0);
}

/// Critical value of the KS statistic at upper-tail probability alpha, with
/// Stephens' finite-sample scaling sqrt(n) + 0.12 + 0.11/sqrt(n).
inline double ks_critical(std::size_t n, double alpha) {
  double lo = 0.1, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > alpha ? lo : hi) = mid;
  }
  const double rn = std::sqrt(static_cast<double>(n));
  return lo / (rn + 0.12 + 0.11 / rn);
}

}  // namespace oracle
