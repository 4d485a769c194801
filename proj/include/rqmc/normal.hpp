#pragma once

namespace rqmc {

/// Standard normal quantile. Acklam's rational approximation refined by one
/// Halley step; relative error below 1e-9 on (1e-300, 1 - 1e-16).
/// Returns -inf at 0 and +inf at 1; throws outside [0,1].
double normal_quantile(double p);

double normal_cdf(double x);

/// log of the N(mean, variance) density at y.
double normal_log_pdf(double y, double mean, double variance);

}  // namespace rqmc
