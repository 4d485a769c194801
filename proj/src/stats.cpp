#include "rqmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rqmc/error.hpp"

namespace rqmc {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("line fit needs at least two paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error("line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

double log_log_slope(std::span<const double> n, std::span<const double> y, double lo, double hi) {
  if (n.size() != y.size()) throw Error("log-log fit needs paired points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < lo || n[i] > hi) continue;
    if (!(y[i] > 0.0)) throw Error("log-log fit needs positive values");
    lx.push_back(std::log2(n[i]));
    ly.push_back(std::log2(y[i]));
  }
  return fit_line(lx, ly).slope;
}

double ks_statistic_uniform(std::span<const double> sample) {
  if (sample.empty()) throw Error("empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - x[i]);
    d = std::max(d, x[i] - static_cast<double>(i) / n);
  }
  return d;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) {
    // The alternating series converges slowly here; use the Jacobi dual.
    const double q = std::exp(-M_PI * M_PI / (8.0 * x * x));
    double acc = 0.0;
    for (int k = 1; k <= 7; k += 2) acc += std::pow(q, k * k);
    return 1.0 - std::sqrt(2.0 * M_PI) / x * acc;
  }
  double acc = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::exp(-2.0 * k * k * x * x);
    acc += (k % 2) ? term : -term;
    if (term < 1e-300) break;
  }
  return std::clamp(acc, 0.0, 1.0);
}

}  // namespace rqmc
