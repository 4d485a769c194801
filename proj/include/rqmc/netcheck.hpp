#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rqmc/point_set.hpp"

namespace rqmc {

/// prod_j [a_j b^-d_j, (a_j + 1) b^-d_j).
struct BAryBox {
  int base = 2;
  std::vector<int> depth;            // d_j
  std::vector<std::uint64_t> index;  // a_j < b^d_j

  int total_depth() const;
  double volume() const;
  /// Membership by digit comparison: the leading d_j digits of coordinate j
  /// must spell a_j.
  bool contains(const PointSet& ps, std::size_t n) const;
};

/// Number of boxes with sum_j d_j = D: b^D * C(D+s-1, s-1).
double box_count(int base, int dim, int total_depth);

/// Visits every box with sum_j d_j = D exactly once. Throws when the count
/// exceeds the 1e8 guard.
void enumerate_boxes(int base, int dim, int total_depth, const std::function<void(const BAryBox&)>& visit);

/// Every box of volume b^(t-m) holds exactly b^t points. Requires N = b^m.
bool is_tms_net(const PointSet& ps, int t, int m);

/// Every box of volume b^(t-m) holds exactly lambda b^t points and none of
/// volume b^(t-m-1) holds more than b^t. Requires N = lambda b^m.
bool is_lambda_tms_net(const PointSet& ps, int lambda, int t, int m);

}  // namespace rqmc
