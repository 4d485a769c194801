#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rqmc/integrands.hpp"
#include "rqmc/scrambling.hpp"
#include "rqmc/sequences.hpp"

namespace rqmc {

struct QuadratureEstimate {
  double value = 0.0;
  std::size_t N = 0;
};

/// N^-1 sum_n f(x_n) with x_n = point_value(ps, n, ., residual). Throws
/// "non-finite integrand value at point n" on NaN or infinity.
QuadratureEstimate estimate(const PointSet& ps, const IntegrandSpec& f, const ResidualStream& residual);

struct MSERecord {
  std::size_t N = 0;
  std::size_t R = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased, across replications
  double mse = 0.0;       // mean of (estimate - exact)^2
  double exact = 0.0;
};

struct MSEReport {
  std::string generator;
  std::string scheme;
  std::string integrand;
  int dim = 0;
  std::uint64_t seed = 0;
  std::vector<MSERecord> records;

  /// Columns N,R,mean,variance,mse,exact with %.17g values.
  void write_csv(std::ostream& out) const;
  std::string metadata_json() const;
};

/// R independent scramblings (seed of replication r derived from
/// master_seed and r). Every N in the list is estimated from the first N
/// points of the same scrambled sequence within a replication.
MSEReport replicate(const GeneratorSpec& gen, ScrambleScheme scheme, const IntegrandSpec& f, double exact,
                    const std::vector<std::size_t>& N_list, std::size_t R, std::uint64_t master_seed,
                    int threads = 0);

/// Per-replication estimates behind replicate(): result[r][i] for N_list[i].
std::vector<std::vector<double>> replicate_estimates(const GeneratorSpec& gen, ScrambleScheme scheme,
                                                     const IntegrandSpec& f, const std::vector<std::size_t>& N_list,
                                                     std::size_t R, std::uint64_t master_seed, int threads = 0);

/// Gamma^(b)_{t+1,s+1} sigma^2 / N.
double bound_basic(int t, int s, int b, double sigma2, double N);
/// (sigma^2/N) {[Gamma_{t,s}(1 + 2c_b)]^(1/2) + b^t / N^(1/2)}^2.
double bound_b1(int t, int s, int b, double sigma2, double N);
/// e (3 + 2 sqrt 2) sigma^2 / N, for (0,s)-sequences.
double bound_b2(double sigma2, double N);
/// N_s^(b); the tables report max(1, N_s^(b)).
double crossover_N(int b, int s);

struct BoundReport {
  double N = 1;
  int t = 0;
  int s = 1;
  int b = 2;
  double sigma2 = 1.0;
  double basic_bound = 0.0;
  std::optional<double> b1_bound;  // needs Gamma_{t,s}: absent for t = 0, b < s
  std::optional<double> b2_bound;  // t = 0 and b >= s only
  double trivial_bound = 0.0;
  double crossover = 0.0;          // max(1, N_s^(b))

  std::string to_json() const;
};

BoundReport bound_report(int t, int s, int b, double sigma2, double N);

/// Sample variance of f over n i.i.d. uniform points.
double monte_carlo_variance(const IntegrandSpec& f, std::size_t n, std::uint64_t seed);

}  // namespace rqmc
