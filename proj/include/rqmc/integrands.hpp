#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "rqmc/kernels.hpp"

namespace rqmc {

enum class IntegrandId { phi1, phi2, phi3, phi4, custom };

/// phi1 = sum x_i, phi2 = max(sum x_i - s/2, 0), phi3 = 1{sum x_i > s/2},
/// phi4 = 12^(s/2) prod (x_i - 1/2), or a user function with optional
/// reference values.
struct IntegrandSpec {
  IntegrandId id = IntegrandId::custom;
  int dim = 1;
  std::string name;
  std::function<double(std::span<const double>)> fn;
  std::optional<double> integral;
  std::optional<double> variance;

  static IntegrandSpec phi(int which, int dim);
  static IntegrandSpec custom(std::string name, int dim, std::function<double(std::span<const double>)> fn,
                              std::optional<double> integral = std::nullopt,
                              std::optional<double> variance = std::nullopt);

  /// Batch kernel description for the built-in integrands.
  std::optional<kernels::ReductionParams> reduction() const;
};

double evaluate(const IntegrandSpec& spec, std::span<const double> x);

/// out[n] = f(point n) for `count` points stored column-major in `cols`.
void evaluate_batch(const IntegrandSpec& spec, std::span<const double> cols, std::size_t count, std::span<double> out);

/// Throws "no reference value" for custom integrands without one.
double exact_integral(const IntegrandSpec& spec);
double exact_variance(const IntegrandSpec& spec);

/// Looks up "phi1".."phi4" or a registered name.
IntegrandSpec make_integrand(const std::string& name, int dim);
void register_integrand(const std::string& name, std::function<IntegrandSpec(int dim)> factory);

/// CDF of the sum of s independent U(0,1) variables.
double irwin_hall_cdf(int s, double x);

/// E[(a - S)_+^r] for S ~ Irwin-Hall(s), from the piecewise polynomial
/// r!/(s+r)! sum_k (-1)^k C(s,k) (a-k)_+^(s+r). Exact integer arithmetic when
/// 2a is an integer and s <= 20.
double irwin_hall_lower_moment(int s, double a, int r);

}  // namespace rqmc
