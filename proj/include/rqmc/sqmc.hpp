#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rqmc/quadrature.hpp"
#include "rqmc/scrambling.hpp"

namespace rqmc {

/// y_k | z_k ~ N(mu_y(z_k), var_y(z_k)), z_k | z_{k-1} ~ N(mu_z(z_{k-1}, k),
/// var_z(z_{k-1}, k)), z_0 ~ N(mu0, var0). Second parameters are variances.
struct StateSpaceModel {
  std::string name = "custom";
  std::function<double(double z)> mu_y;
  std::function<double(double z)> var_y;
  std::function<double(double z, int k)> mu_z;
  std::function<double(double z, int k)> var_z;
  double mu0 = 0.0;
  double var0 = 1.0;

  /// Checks the functions exist and the variances are positive at probe
  /// states; throws otherwise.
  void validate() const;

  /// mu_y = 0, var_y = exp(-0.1 + z), mu_z = 0.9 z, var_z = 0.1,
  /// z_0 ~ N(0, 0.1 / (1 - 0.9^2)).
  static StateSpaceModel stochastic_volatility();
  /// mu_y = z^2/20, var_y = 1, mu_z = z/2 + 25 z/(1+z^2) + 8 cos(1.2 k),
  /// var_z = 10, z_0 ~ N(0, 2).
  static StateSpaceModel nonlinear();
};

StateSpaceModel make_model(const std::string& name);

struct Trajectory {
  std::vector<double> states;
  std::vector<double> observations;
};

Trajectory simulate(const StateSpaceModel& model, int T, std::uint64_t seed);

/// One value per line; blank lines and lines starting with '#' are skipped.
std::vector<double> read_observations(std::istream& in);

struct LikelihoodRun {
  std::string model;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  double log_likelihood = 0.0;
  std::vector<double> ess;  // per step, (sum w)^2 / sum w^2
};

struct FilterOptions {
  ScrambleScheme scheme = ScrambleScheme::owen_nested;
};

/// SQMC log-likelihood with a fresh scrambled Sobol' set per step (1-dim at k = 0,
/// 2-dim afterwards). Throws "weight collapse at step k".
LikelihoodRun sqmc_loglik(const StateSpaceModel& model, const std::vector<double>& y, std::size_t N,
                          std::uint64_t seed, const FilterOptions& opt = {});

/// The same recursion driven by i.i.d. uniforms (bootstrap filter with
/// multinomial resampling through the ECDF inverse).
LikelihoodRun smc_loglik(const StateSpaceModel& model, const std::vector<double>& y, std::size_t N,
                         std::uint64_t seed);

struct SweepReport {
  MSEReport sqmc;
  MSEReport smc;
  /// Columns method,N,R,mean,variance,mse,exact.
  void write_csv(std::ostream& out) const;
};

/// Per-N MSE of log p^N against `reference` for both filters, replication
/// seeds derived from master_seed.
SweepReport mse_sweep(const StateSpaceModel& model, const std::vector<double>& y,
                      const std::vector<std::size_t>& N_list, std::size_t R, std::uint64_t master_seed,
                      double reference, int threads = 0, bool include_smc = true);

/// Mean of R high-N SQMC runs, used as the reference log-likelihood when no
/// exact value exists.
double reference_loglik(const StateSpaceModel& model, const std::vector<double>& y, std::size_t N, std::size_t R,
                        std::uint64_t seed, int threads = 0);

}  // namespace rqmc
