#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rqmc/error.hpp"
#include "rqmc/rng.hpp"
#include "rqmc/sir.hpp"

using namespace rqmc;

namespace {

SirProblem linear() {
  SirProblem p;
  p.target = [](std::span<const double> z) { return 2.0 * z[0]; };
  p.proposal = [](std::span<const double>) { return 1.0; };
  p.proposal_inverse = [](std::span<const double> u, std::span<double> z) { z[0] = u[0]; };
  p.f = [](std::span<const double> z) { return z[0]; };
  return p;
}

// Linear scan for the smallest sorted index with cum >= u.
std::size_t scan(const WeightedCloud& c, double u) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.cum[i] >= u && (u > 0.0 || c.W[i] > 0.0)) return i;
  return c.size() - 1;
}

}  // namespace

TEST_CASE("generalized inverse examples") {
  const std::vector<double> z{0.7, 0.2}, w{3.0, 1.0};
  const WeightedCloud c = make_cloud(1, z, w);
  CHECK(c.keys[0] == 0.2);
  CHECK(c.W[0] == 0.25);
  CHECK(ecdf_inverse(c, 0.2) == 0.2);
  CHECK(ecdf_inverse(c, 0.25) == 0.2);
  CHECK(ecdf_inverse(c, 0.3) == 0.7);
  CHECK(ecdf_inverse(c, 1.0) == 0.7);
  const std::vector<double> z1{0.4}, w1{2.0};
  const WeightedCloud single = make_cloud(1, z1, w1);
  for (double u : {0.0, 0.5, 1.0}) CHECK(ecdf_inverse(single, u) == 0.4);
}

TEST_CASE("uniform weights: u = j/8 selects rank j") {
  std::vector<double> z(8), w(8, 1.0);
  for (int i = 0; i < 8; ++i) z[static_cast<std::size_t>(i)] = (7 - i) / 8.0 + 0.01;
  const WeightedCloud c = make_cloud(1, z, w);
  for (int j = 1; j <= 8; ++j) CHECK(ecdf_inverse_index(c, j / 8.0) == static_cast<std::size_t>(j - 1));
  std::mt19937_64 gen(4);
  std::vector<double> zr(257), wr(257);
  for (std::size_t i = 0; i < zr.size(); ++i) {
    zr[i] = std::uniform_real_distribution<double>(0, 1)(gen);
    wr[i] = i % 5 == 0 ? 0.0 : std::exponential_distribution<double>(1.0)(gen);
  }
  const WeightedCloud cr = make_cloud(1, zr, wr);
  CHECK(cr.cum.back() == 1.0);
  CHECK(std::is_sorted(cr.keys.begin(), cr.keys.end()));
  for (int i = 0; i <= 4000; ++i) {
    const double u = i / 4000.0;
    CHECK_EQ(ecdf_inverse_index(cr, u), scan(cr, u));
  }
  for (double u : cr.cum) CHECK_EQ(ecdf_inverse_index(cr, u), scan(cr, u));
}

TEST_CASE("zero-weight leaders are skipped at u = 0") {
  const std::vector<double> z{0.1, 0.2, 0.3}, w{0.0, 0.0, 1.0};
  CHECK(ecdf_inverse(make_cloud(1, z, w), 0.0) == 0.3);
}

TEST_CASE("weight errors") {
  const std::vector<double> z{0.1, 0.2}, bad{1.0, std::nan("")}, zero{0.0, 0.0};
  CHECK_THROWS_WITH_AS(make_cloud(1, z, bad), "non-finite weight at particle 1", Error);
  CHECK_THROWS_WITH_AS(make_cloud(1, z, zero), "degenerate weights", Error);
  CHECK_THROWS_AS(make_cloud(3, z, zero), Error);
}

TEST_CASE("constant test functions are integrated exactly") {
  SirProblem p = linear();
  p.f = [](std::span<const double>) { return 3.25; };
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    for (std::size_t N : {1, 7, 64, 1000}) CHECK(sir_estimate(p, N, seed) == 3.25);
  SirProblem q;
  q.dim = 2;
  q.target = [](std::span<const double> z) { return 4.0 * z[0] * z[1]; };
  q.proposal = [](std::span<const double>) { return 1.0; };
  q.proposal_inverse = [](std::span<const double> u, std::span<double> z) { std::copy(u.begin(), u.end(), z.begin()); };
  q.f = [](std::span<const double>) { return -1.5; };
  CHECK(sir_estimate(q, 333, 5) == -1.5);
}

TEST_CASE("permutation invariance of the cloud") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> z(2 * 300), w(300);
  for (auto& v : z) v = U(gen);
  for (auto& v : w) v = U(gen);
  z[2] = z[0];
  z[3] = z[1];
  const WeightedCloud a = make_cloud(2, z, w, 10);
  std::vector<std::size_t> perm(300);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<double> zp(z.size()), wp(w.size());
  for (std::size_t i = 0; i < 300; ++i) {
    zp[2 * i] = z[2 * perm[i]];
    zp[2 * i + 1] = z[2 * perm[i] + 1];
    wp[i] = w[perm[i]];
  }
  const WeightedCloud b = make_cloud(2, zp, wp, 10);
  CHECK(a.z == b.z);
  CHECK(a.w == b.w);
  CHECK(a.cum == b.cum);
}

TEST_CASE("equal weights reduce to quadrature over the proposal draws") {
  SirProblem p = linear();
  p.target = [](std::span<const double>) { return 1.0; };
  p.f = [](std::span<const double> z) { return z[0] * z[0]; };
  double s = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) s += sir_estimate(p, 1 << 12, seed);
  CHECK(s / 20 == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("QMC resampling beats Monte Carlo on the linear problem") {
  const SirProblem p = linear();
  const std::size_t N = 1 << 12;
  double mse_q = 0.0, mse_m = 0.0;
  SirOptions mc;
  mc.sampler = Sampler::monte_carlo;
  for (std::uint64_t r = 0; r < 500; ++r) {
    const double q = sir_estimate(p, N, rng::derive(1, r)) - 2.0 / 3.0;
    const double m = sir_estimate(p, N, rng::derive(1, r), mc) - 2.0 / 3.0;
    mse_q += q * q;
    mse_m += m * m;
  }
  CHECK(mse_q < mse_m / 10);
  // Importance sampling plus multinomial resampling: (8/135 + 1/18) / N.
  CHECK(mse_m / 500 == doctest::Approx((8.0 / 135 + 1.0 / 18) / N).epsilon(0.25));
}
