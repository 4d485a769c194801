#include "rqmc/netcheck.hpp"

#include <cmath>
#include <string>

#include "rqmc/error.hpp"

namespace rqmc {

namespace {

constexpr double kMaxBoxes = 1e8;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void guard(int base, int dim, int total_depth) {
  if (box_count(base, dim, total_depth) > kMaxBoxes)
    throw Error("net check too large: " + std::to_string(box_count(base, dim, total_depth)) + " boxes exceed 1e8");
}

// Calls visit(d) for every composition d of `total` into `dim` non-negative parts.
template <class F>
void for_each_composition(int dim, int total, F&& visit) {
  std::vector<int> d(static_cast<std::size_t>(dim), 0);
  const auto rec = [&](auto&& self, int j, int left) -> void {
    if (j == dim - 1) {
      d[static_cast<std::size_t>(j)] = left;
      visit(d);
      return;
    }
    for (int v = left; v >= 0; --v) {
      d[static_cast<std::size_t>(j)] = v;
      self(self, j + 1, left - v);
    }
  };
  rec(rec, 0, total);
}

// Point counts of all boxes with depth vector d, indexed in mixed radix.
std::vector<std::uint32_t> box_occupancy(const PointSet& ps, const std::vector<int>& d) {
  const auto b = static_cast<std::uint64_t>(ps.base());
  int total = 0;
  for (int v : d) total += v;
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(ipow(b, total)), 0);
  std::vector<std::uint64_t> shift(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) shift[j] = ipow(b, d[j]);
  for (std::size_t n = 0; n < ps.count(); ++n) {
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (d[j] == 0) continue;
      idx = idx * shift[j] + ps.leading(n, static_cast<int>(j), d[j]);
    }
    ++counts[static_cast<std::size_t>(idx)];
  }
  return counts;
}

bool all_boxes_hold(const PointSet& ps, int total_depth, std::uint32_t exact, bool at_most) {
  if (total_depth > ps.depth()) throw Error("box depth exceeds the digit depth of the point set");
  bool ok = true;
  for_each_composition(ps.dim(), total_depth, [&](const std::vector<int>& d) {
    if (!ok) return;
    for (std::uint32_t c : box_occupancy(ps, d)) {
      if (at_most ? c > exact : c != exact) {
        ok = false;
        return;
      }
    }
  });
  return ok;
}

}  // namespace

int BAryBox::total_depth() const {
  int t = 0;
  for (int v : depth) t += v;
  return t;
}

double BAryBox::volume() const { return std::pow(static_cast<double>(base), -total_depth()); }

bool BAryBox::contains(const PointSet& ps, std::size_t n) const {
  if (ps.base() != base || static_cast<std::size_t>(ps.dim()) != depth.size()) throw Error("box does not match point set");
  for (std::size_t j = 0; j < depth.size(); ++j)
    if (depth[j] > 0 && ps.leading(n, static_cast<int>(j), depth[j]) != index[j]) return false;
  return true;
}

double box_count(int base, int dim, int total_depth) {
  return std::pow(static_cast<double>(base), total_depth) * binomial(total_depth + dim - 1, dim - 1);
}

void enumerate_boxes(int base, int dim, int total_depth, const std::function<void(const BAryBox&)>& visit) {
  require_base(base);
  if (dim < 1 || total_depth < 0) throw Error("invalid box enumeration");
  guard(base, dim, total_depth);
  const auto b = static_cast<std::uint64_t>(base);
  for_each_composition(dim, total_depth, [&](const std::vector<int>& d) {
    BAryBox box{base, d, std::vector<std::uint64_t>(d.size(), 0)};
    std::vector<std::uint64_t> limit(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) limit[j] = ipow(b, d[j]);
    // Odometer over the a_j, last coordinate fastest.
    while (true) {
      visit(box);
      std::size_t j = d.size();
      while (j > 0) {
        --j;
        if (++box.index[j] < limit[j]) break;
        box.index[j] = 0;
        if (j == 0) return;
      }
      if (d.size() == 0) return;
    }
  });
}

bool is_tms_net(const PointSet& ps, int t, int m) {
  if (t < 0 || m < t) throw Error("net parameters need m >= t >= 0");
  if (ps.count() != ipow(static_cast<std::uint64_t>(ps.base()), m)) throw Error("not a power-net size");
  guard(ps.base(), ps.dim(), m - t);
  return all_boxes_hold(ps, m - t, static_cast<std::uint32_t>(ipow(static_cast<std::uint64_t>(ps.base()), t)), false);
}

bool is_lambda_tms_net(const PointSet& ps, int lambda, int t, int m) {
  if (t < 0 || m < t) throw Error("net parameters need m >= t >= 0");
  if (lambda < 1 || lambda >= ps.base()) throw Error("lambda must lie in [1, b-1]");
  const std::uint64_t bt = ipow(static_cast<std::uint64_t>(ps.base()), t);
  if (ps.count() != static_cast<std::uint64_t>(lambda) * ipow(static_cast<std::uint64_t>(ps.base()), m))
    throw Error("not a lambda-net size");
  guard(ps.base(), ps.dim(), m - t + 1);
  return all_boxes_hold(ps, m - t, static_cast<std::uint32_t>(static_cast<std::uint64_t>(lambda) * bt), false) &&
         all_boxes_hold(ps, m - t + 1, static_cast<std::uint32_t>(bt), true);
}

}  // namespace rqmc
