#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rqmc/error.hpp"
#include "rqmc/sqmc.hpp"
#include "rqmc/stats.hpp"

using namespace rqmc;

namespace {

StateSpaceModel linear_gaussian() {
  StateSpaceModel m;
  m.name = "lg";
  m.mu_y = [](double z) { return z; };
  m.var_y = [](double) { return 1.0; };
  m.mu_z = [](double z, int) { return 0.8 * z; };
  m.var_z = [](double, int) { return 0.5; };
  m.mu0 = 0.3;
  m.var0 = 1.5;
  return m;
}

// Kalman filter log-likelihood of the linear Gaussian model above.
double kalman(const std::vector<double>& y) {
  double mean = 0.3, var = 1.5, ll = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (k > 0) {
      mean = 0.8 * mean;
      var = 0.64 * var + 0.5;
    }
    const double s = var + 1.0;
    ll += -0.5 * (std::log(2 * std::numbers::pi * s) + (y[k] - mean) * (y[k] - mean) / s);
    const double gain = var / s;
    mean += gain * (y[k] - mean);
    var *= 1.0 - gain;
  }
  return ll;
}

// log int N(y; mu_y(z), var_y(z)) N(z; mu0, var0) dz by the midpoint rule.
double one_step(const StateSpaceModel& m, double y) {
  const double sd = std::sqrt(m.var0);
  const int n = 200000;
  const double lo = m.mu0 - 12 * sd, h = 24 * sd / n;
  CompensatedSum acc;
  for (int i = 0; i < n; ++i) {
    const double z = lo + (i + 0.5) * h;
    const double py = std::exp(-0.5 * (y - m.mu_y(z)) * (y - m.mu_y(z)) / m.var_y(z)) / std::sqrt(2 * std::numbers::pi * m.var_y(z));
    const double pz = std::exp(-0.5 * (z - m.mu0) * (z - m.mu0) / m.var0) / std::sqrt(2 * std::numbers::pi * m.var0);
    acc.add(py * pz * h);
  }
  return std::log(acc.value());
}

}  // namespace

TEST_CASE("model definitions") {
  const StateSpaceModel sv = StateSpaceModel::stochastic_volatility();
  CHECK(sv.var0 == doctest::Approx(10.0 / 19.0));
  CHECK(sv.var_y(0.1) == doctest::Approx(1.0));
  CHECK(sv.mu_z(2.0, 3) == doctest::Approx(1.8));
  const StateSpaceModel nl = make_model("nl");
  for (int k = 0; k < 6; ++k) CHECK(nl.mu_z(0.0, k) == doctest::Approx(8 * std::cos(1.2 * k)));
  CHECK(nl.mu_z(1.0, 0) == doctest::Approx(0.5 + 12.5 + 8));
  CHECK(nl.mu_y(2.0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(make_model("ar"), Error);
  StateSpaceModel bad = sv;
  bad.var_z = [](double, int) { return -1.0; };
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("simulation is deterministic and has the right moments") {
  const StateSpaceModel sv = StateSpaceModel::stochastic_volatility();
  const Trajectory a = simulate(sv, 50, 3), b = simulate(sv, 50, 3), c = simulate(sv, 50, 4);
  CHECK(a.states == b.states);
  CHECK(a.observations == b.observations);
  CHECK(a.states != c.states);
  RunningMoments m;
  const Trajectory longrun = simulate(sv, 200000, 1);
  for (double z : longrun.states) m.add(z);
  CHECK(std::abs(m.mean()) < 0.03);
  CHECK(m.variance() == doctest::Approx(10.0 / 19.0).epsilon(0.05));
}

TEST_CASE("observation reader") {
  std::istringstream in("# header\n1.5\n\n  -2e-1 \n3\n");
  CHECK(read_observations(in) == std::vector<double>{1.5, -0.2, 3.0});
  std::istringstream bad("1.0\nabc\n");
  CHECK_THROWS_WITH_AS(read_observations(bad), "malformed observation on line 2", Error);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_observations(empty), Error);
}

TEST_CASE("one observation against quadrature") {
  for (const auto& model : {StateSpaceModel::stochastic_volatility(), StateSpaceModel::nonlinear()}) {
    const std::vector<double> y{0.7};
    const double exact = one_step(model, y[0]);
    RunningMoments q;
    for (std::uint64_t s = 0; s < 20; ++s) q.add(sqmc_loglik(model, y, 1 << 12, s).log_likelihood);
    CHECK(q.mean() == doctest::Approx(exact).epsilon(1e-4));
  }
}

TEST_CASE("linear Gaussian model against the Kalman filter") {
  const StateSpaceModel m = linear_gaussian();
  const std::vector<double> y = simulate(m, 25, 2).observations;
  const double exact = kalman(y);
  RunningMoments q, s;
  for (std::uint64_t r = 0; r < 40; ++r) {
    q.add(sqmc_loglik(m, y, 1024, r).log_likelihood);
    s.add(smc_loglik(m, y, 1024, r).log_likelihood);
  }
  CHECK(std::abs(q.mean() - exact) < 4 * std::sqrt(q.variance() / 40) + 5e-3);
  CHECK(std::abs(s.mean() - exact) < 4 * std::sqrt(s.variance() / 40) + 5e-3);
  CHECK(q.variance() < s.variance() / 4);
}

TEST_CASE("filters are deterministic and report ESS") {
  const StateSpaceModel sv = StateSpaceModel::stochastic_volatility();
  const std::vector<double> y = simulate(sv, 10, 1).observations;
  const LikelihoodRun a = sqmc_loglik(sv, y, 100, 7), b = sqmc_loglik(sv, y, 100, 7);
  CHECK(a.log_likelihood == b.log_likelihood);
  CHECK(a.ess == b.ess);
  REQUIRE(a.ess.size() == 10);
  for (double e : a.ess) {
    CHECK(e >= 1.0);
    CHECK(e <= 100.0 + 1e-9);
  }
  CHECK(smc_loglik(sv, y, 100, 7).log_likelihood == smc_loglik(sv, y, 100, 7).log_likelihood);
  CHECK_THROWS_AS(sqmc_loglik(sv, y, 1, 7), Error);
  CHECK_THROWS_AS(sqmc_loglik(sv, {}, 16, 7), Error);
}

TEST_CASE("weight collapse is reported") {
  StateSpaceModel m = linear_gaussian();
  m.var_y = [](double) { return 1e-300; };
  CHECK_THROWS_WITH_AS(sqmc_loglik(m, {1e200}, 16, 1), "weight collapse at step 0", Error);
}

TEST_CASE("sweep is independent of the thread count") {
  const StateSpaceModel sv = StateSpaceModel::stochastic_volatility();
  const std::vector<double> y = simulate(sv, 15, 1).observations;
  const std::vector<std::size_t> Ns{16, 40, 64};
  const SweepReport a = mse_sweep(sv, y, Ns, 8, 3, -20.0, 1);
  const SweepReport b = mse_sweep(sv, y, Ns, 8, 3, -20.0, 6);
  std::ostringstream sa, sb;
  a.write_csv(sa);
  b.write_csv(sb);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("method,N,R,mean,variance,mse,exact\nsqmc,16,8,", 0) == 0);
  CHECK(a.smc.records.size() == 3);
  const SweepReport c = mse_sweep(sv, y, Ns, 8, 3, -20.0, 2, false);
  CHECK(c.smc.records.empty());
  CHECK_THROWS_AS(mse_sweep(sv, y, {}, 8, 3, 0.0), Error);
}
