#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rqmc/anova.hpp"
#include "rqmc/error.hpp"
#include "rqmc/integrands.hpp"
#include "rqmc/quadrature.hpp"
#include "rqmc/sequences.hpp"
#include "rqmc/stats.hpp"

using namespace rqmc;

namespace {
double identity(std::span<const double> x) { return x[0]; }
}

TEST_CASE("f(x) = x has sigma^2_{(k)} = 2^-2k / 16") {
  const AnovaTable t = build_anova_table(identity, 1, 2, 8, 1 << 12, 1.0 / 12.0);
  for (int k = 0; k <= 8; ++k) CHECK(t.at({{0}, {k}}) == doctest::Approx(std::ldexp(1.0, -2 * k) / 16).epsilon(1e-12));
  // The table plus the residual is the full variance.
  CHECK(t.tabled_sum() + t.residual() == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(t.residual() == doctest::Approx(std::ldexp(1.0, -18) / 16 * 4.0 / 3.0).epsilon(1e-9));
  const AnovaTable deep = build_anova_table(identity, 1, 2, 12, 1 << 13, 1.0 / 12.0);
  CHECK(std::abs(deep.tabled_sum() - 1.0 / 12.0) < 1e-8);
}

TEST_CASE("base 3 levels of f(x) = x") {
  // nu at depth k+1 in base 3 contributes (b^2 - 1) / (12 b^2) b^-2k.
  const AnovaTable t = build_anova_table(identity, 1, 3, 4, 243 * 3);
  for (int k = 0; k <= 4; ++k)
    CHECK(t.at({{0}, {k}}) == doctest::Approx(8.0 / 108.0 * std::pow(3.0, -2 * k)).epsilon(1e-10));
}

TEST_CASE("Parseval on a grid-resolved additive function") {
  auto f = [](std::span<const double> x) { return x[0] + x[1] * x[1]; };
  const int K = 5;
  const MidpointGrid grid(f, 2, 1 << (K + 1));
  const AnovaTable t = build_anova_table(f, 2, 2, K, 1 << (K + 1));
  CHECK(t.sigma2 == doctest::Approx(grid.variance()).epsilon(1e-14));
  CHECK(t.tabled_sum() == doctest::Approx(grid.variance()).epsilon(1e-12));
  for (const auto& [key, v] : t.entries)
    if (key.u.size() == 2) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("Haar components are orthogonal") {
  auto f = [](std::span<const double> x) { return std::exp(x[0]) * std::sin(3 * x[1]) + x[1]; };
  const MidpointGrid grid(f, 2, 64);
  const std::vector<AnovaKey> keys{{{0}, {0}}, {{0}, {2}}, {{1}, {1}}, {{0, 1}, {0, 0}}, {{0, 1}, {1, 2}}, {{0, 1}, {2, 1}}};
  for (std::size_t a = 0; a < keys.size(); ++a)
    for (std::size_t b = 0; b < keys.size(); ++b) {
      const double ip = haar_inner_product(grid, 2, keys[a], keys[b]);
      if (a == b)
        CHECK(ip == doctest::Approx(sigma_uk(grid, 2, keys[a])).epsilon(1e-12));
      else
        CHECK(std::abs(ip) < 1e-13);
    }
}

TEST_CASE("product integrand has no main effects") {
  const IntegrandSpec phi4 = IntegrandSpec::phi(4, 2);
  const AnovaTable t = build_anova_table(phi4.fn, 2, 2, 6, 128, 1.0);
  double mains = 0.0, inter = 0.0;
  for (const auto& [key, v] : t.entries) (key.u.size() == 1 ? mains : inter) += v;
  CHECK(mains < 1e-14);
  CHECK(inter > 0.9);
}

TEST_CASE("sigma_uk direct form and resolution guards") {
  CHECK(sigma_uk(identity, 1, 2, {{0}, {3}}, 64) == doctest::Approx(std::ldexp(1.0, -6) / 16).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(sigma_uk(identity, 1, 2, {{0}, {3}}, 8), doctest::Contains("under-resolved"), Error);
  CHECK_THROWS_WITH_AS(build_anova_table(identity, 1, 2, 4, 24), doctest::Contains("under-resolved"), Error);
  CHECK_THROWS_AS(build_anova_table(identity, 4, 2, 1, 4), Error);
  CHECK_THROWS_AS(build_anova_table(identity, 1, 2, 13, 1 << 14), Error);
}

TEST_CASE("gain factor and c_b") {
  CHECK(gain_factor_bound(0, 3, 3) == doctest::Approx(std::numbers::e));
  CHECK(gain_factor_bound(1, 2, 2) == doctest::Approx(18.0));
  CHECK(gain_factor_bound(2, 3, 3) == doctest::Approx(9.0 * 8.0));
  CHECK_THROWS_WITH_AS(gain_factor_bound(0, 3, 2), "no (0,s)-sequence exists in this base", Error);
  CHECK(c_b(2) == doctest::Approx(1.0 / (std::sqrt(2.0) - 1.0)));
  CHECK(c_b(5) == doctest::Approx(2.0 / (std::sqrt(5.0) - 1.0)));
}

TEST_CASE("variance bound at N = 1 and table depth") {
  const AnovaTable t = build_anova_table(identity, 1, 2, 10, 1 << 11, 1.0 / 12.0);
  const double s2 = 1.0 / 12.0;
  CHECK(theorem1_bound(t, 1, 0, 2, 1) == doctest::Approx(2 * std::numbers::e * (1 + 2 * c_b(2)) * s2 + s2));
  CHECK_THROWS_WITH_AS(theorem1_bound(t, 1 << 11, 0, 2, 1), "table too shallow", Error);
  CHECK_NOTHROW(theorem1_bound(t, (1 << 11) - 1, 0, 2, 1));
  CHECK_THROWS_AS(theorem1_bound(t, 4, 0, 3, 1), Error);
}

TEST_CASE("variance bound dominates the scrambled variance of f(x) = x") {
  const AnovaTable t = build_anova_table(identity, 1, 2, 8, 1 << 9, 1.0 / 12.0);
  std::vector<std::size_t> Ns;
  for (std::size_t N = 1; N <= 64; ++N) Ns.push_back(N);
  const IntegrandSpec f = IntegrandSpec::phi(1, 1);
  const auto est = replicate_estimates(GeneratorSpec::sobol(1), ScrambleScheme::owen_nested, f, Ns, 2000, 11);
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    RunningMoments m;
    for (const auto& r : est) m.add(r[i]);
    CHECK(m.variance() <= theorem1_bound(t, Ns[i], 0, 2, 1));
  }
}

TEST_CASE("B terms") {
  AnovaTable t;
  t.base = 2;
  t.dim = 1;
  t.depth = 3;
  t.sigma2 = 1.0;
  t.entries[{{0}, {0}}] = 0.5;
  t.entries[{{0}, {1}}] = 0.25;
  t.entries[{{0}, {2}}] = 0.125;
  t.entries[{{0}, {3}}] = 0.0625;
  CHECK(t.residual() == doctest::Approx(0.0625));
  CHECK(t.level_sum({0}, 2) == 0.125);
  // k = 3, c = 0: L = 2, l = 3 is tail, others scaled by 2^(l-2).
  CHECK(b_term(t, 3, 0) == doctest::Approx(0.5 / 4 + 0.25 / 2 + 0.125 + 0.0625 + 0.0625));
  CHECK(b_term(t, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("table JSON round trip") {
  const AnovaTable t = build_anova_table([](std::span<const double> x) { return x[0] * x[1] + x[0]; }, 2, 2, 3, 16);
  const AnovaTable back = AnovaTable::from_json(t.to_json());
  CHECK(back.base == t.base);
  CHECK(back.dim == t.dim);
  CHECK(back.depth == t.depth);
  CHECK(back.sigma2 == t.sigma2);
  CHECK(back.entries == t.entries);
  CHECK_THROWS_AS(AnovaTable::from_json("{not json"), Error);
}
