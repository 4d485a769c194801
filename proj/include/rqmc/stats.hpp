#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace rqmc {

/// Welford accumulator; variance() uses the unbiased n-1 denominator.
class RunningMoments {
 public:
  void add(double x) noexcept {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    comp_ += (std::abs(sum_) >= std::abs(x)) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares of y on x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Slope of log2(y) on log2(n) over the points with lo <= n <= hi.
double log_log_slope(std::span<const double> n, std::span<const double> y, double lo, double hi);

/// sup |F_n - x| of a sample against U(0,1).
double ks_statistic_uniform(std::span<const double> sample);

/// Limiting Kolmogorov survival function P(K > x).
double kolmogorov_survival(double x);

}  // namespace rqmc
