#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rqmc/netcheck.hpp"

namespace rqmc {

using Integrand = std::function<double(std::span<const double>)>;

/// Coordinate subset u (sorted, 0-based) and depth vector kappa (one entry
/// per coordinate of u).
struct AnovaKey {
  std::vector<int> u;
  std::vector<int> kappa;
  int level() const;  // |kappa|
  friend auto operator<=>(const AnovaKey&, const AnovaKey&) = default;
};

/// Haar-like decomposition coefficients sigma^2_{u,kappa} for |kappa| <= K.
struct AnovaTable {
  int base = 2;
  int dim = 1;
  int depth = 0;         // K
  double sigma2 = 0.0;   // total variance of f
  std::map<AnovaKey, double> entries;

  double tabled_sum() const;
  /// sigma^2 minus the tabled mass, clamped at zero.
  double residual() const;
  /// sum over |kappa| = l of sigma^2_{u,kappa}.
  double level_sum(const std::vector<int>& u, int l) const;
  double at(const AnovaKey& key) const;

  std::string to_json() const;
  static AnovaTable from_json(const std::string& text);
};

/// Midpoint rule over `box` with R subintervals per coordinate (R^s cells).
double box_mean(const Integrand& f, const BAryBox& box, int resolution);

/// f sampled at the midpoints of the regular R^s grid of [0,1)^s.
class MidpointGrid {
 public:
  MidpointGrid(const Integrand& f, int dim, int resolution, int threads = 0);
  int dim() const noexcept { return dim_; }
  int resolution() const noexcept { return resolution_; }
  std::span<const double> values() const noexcept { return values_; }
  double mean() const;
  double variance() const;

 private:
  int dim_;
  int resolution_;
  std::vector<double> values_;  // last coordinate fastest
};

/// nu_{u,kappa} on its b^{|u|+|kappa|} cells (mixed radix over u, last
/// coordinate of u fastest, each at depth kappa_j + 1). Throws
/// "under-resolved" unless b^(kappa_j+1) divides the grid resolution.
std::vector<double> haar_component(const MidpointGrid& grid, int base, const AnovaKey& key);

/// <nu_a, nu_b> over [0,1)^s, evaluated on the grid.
double haar_inner_product(const MidpointGrid& grid, int base, const AnovaKey& a, const AnovaKey& b);

double sigma_uk(const MidpointGrid& grid, int base, const AnovaKey& key);
double sigma_uk(const Integrand& f, int dim, int base, const AnovaKey& key, int resolution);

/// All entries with nonempty u and |kappa| <= K. dim <= 3, K <= 12, and the
/// resolution must be a multiple of b^(K+1). sigma2 defaults to the grid
/// variance.
AnovaTable build_anova_table(const Integrand& f, int dim, int base, int depth, int resolution,
                             std::optional<double> sigma2 = std::nullopt, int threads = 0);

/// Gamma^(b)_{t,s}: e when t = 0 (needs b >= s), b^t ((b+1)/(b-1))^s otherwise.
double gain_factor_bound(int t, int s, int b);

/// (b-1)^(1/2) / (b^(1/2) - 1).
double c_b(int b);

/// B_c^(k) of the variance bound, computed from the table.
double b_term(const AnovaTable& table, int k, int c);

/// Variance bound for the first N points of a scrambled (t,s)-sequence.
/// Throws "table too shallow" when K < k = floor(log_b N).
double theorem1_bound(const AnovaTable& table, std::uint64_t N, int t, int base, int dim);

}  // namespace rqmc
