#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rqmc/anova.hpp"
#include "rqmc/error.hpp"
#include "rqmc/quadrature.hpp"
#include "rqmc/sequences.hpp"

using namespace rqmc;

TEST_CASE("crossover size table") {
  struct Row {
    int b, s;
    double v;
  };
  const Row rows[] = {{2, 3, 29.77}, {2, 4, 9.93}, {2, 5, 3.31}, {2, 6, 1.11}, {2, 7, 1}, {3, 4, 1.05},
                      {3, 5, 1},     {3, 6, 1},    {3, 7, 1},    {5, 6, 1},    {5, 7, 1}};
  for (const auto& r : rows) CHECK(std::max(1.0, crossover_N(r.b, r.s)) == doctest::Approx(r.v).epsilon(0.01 / r.v));
  for (int s = 9; s <= 20; ++s)
    for (int b : {2, 3, 5, 7, 11, 13}) CHECK(std::max(1.0, crossover_N(b, s)) == 1.0);
  CHECK(bound_report(0, 3, 2, 1.0, 1.0).crossover == doctest::Approx(29.7628).epsilon(1e-5));
}

TEST_CASE("crossover size decreases in b and s") {
  for (int b : {2, 3, 5, 7})
    for (int s = 1; s < 10; ++s) CHECK(crossover_N(b, s + 1) < crossover_N(b, s));
  // In b the decrease holds for the reported max(1, N_s); below 1 the raw
  // value is not monotone (N_9^(5) > N_9^(3)).
  const int bs[] = {2, 3, 5, 7};
  for (int s = 1; s <= 10; ++s)
    for (int i = 0; i + 1 < 4; ++i)
      CHECK(std::max(1.0, crossover_N(bs[i + 1], s)) <= std::max(1.0, crossover_N(bs[i], s)));
  CHECK(crossover_N(5, 9) > crossover_N(3, 9));
}

TEST_CASE("closed-form bounds") {
  CHECK(bound_b2(1.0, 1.0) == doctest::Approx(std::numbers::e * (3 + 2 * std::numbers::sqrt2)).epsilon(1e-15));
  CHECK(bound_b2(1.0, 1.0) < 15.85);
  CHECK(bound_b2(1.0, 1.0) == doctest::Approx(15.843307541695367).epsilon(1e-14));
  CHECK(bound_b2(2.0, 4.0) == doctest::Approx(bound_b2(1.0, 1.0) / 2));
  CHECK(bound_basic(0, 3, 2, 1.0, 1.0) == doctest::Approx(2.0 * 27.0 * 3.0));
  CHECK(bound_basic(1, 3, 2, 2.0, 4.0) == doctest::Approx(4.0 * 81.0 * 2.0 / 4.0));
  const double g = gain_factor_bound(1, 3, 2);
  CHECK(bound_b1(1, 3, 2, 1.0, 16.0) == doctest::Approx(std::pow(std::sqrt(g * (1 + 2 * c_b(2))) + 2.0 / 4.0, 2) / 16));
  // Beyond b^t N_s the B1 bound is the sharper one.
  for (double N : {200.0, 1000.0, 1e5}) CHECK(bound_b1(1, 3, 2, 1.0, N) < bound_basic(1, 3, 2, 1.0, N));
}

TEST_CASE("bound report fields") {
  const BoundReport r = bound_report(0, 3, 2, 1.0, 1.0);
  CHECK_FALSE(r.b1_bound.has_value());
  CHECK_FALSE(r.b2_bound.has_value());
  CHECK(r.trivial_bound == 1.0);
  const BoundReport q = bound_report(0, 3, 3, 0.5, 8.0);
  REQUIRE(q.b2_bound.has_value());
  CHECK(*q.b2_bound == doctest::Approx(bound_b2(0.5, 8.0)));
  REQUIRE(q.b1_bound.has_value());
  const auto j = nlohmann::json::parse(q.to_json());
  CHECK(j.at("b") == 3);
  CHECK(j.at("basic_bound").get<double>() == doctest::Approx(q.basic_bound));
}

TEST_CASE("single estimates") {
  const IntegrandSpec f = IntegrandSpec::phi(1, 2);
  const PointSet ps = generate(GeneratorSpec::sobol(2), 1024);
  const QuadratureEstimate e = estimate(scramble(ps, ScrambleState(5)), f, ResidualStream(5));
  CHECK(e.N == 1024);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-4));
  const IntegrandSpec bad = IntegrandSpec::custom("bad", 1, [](std::span<const double> x) {
    return x[0] > 0.5 ? std::nan("") : 1.0;
  });
  CHECK_THROWS_WITH_AS(estimate(generate(GeneratorSpec::sobol(1), 4), bad, ResidualStream(1)),
                       "non-finite integrand value at point 1", Error);
}

TEST_CASE("replication report") {
  const IntegrandSpec f = IntegrandSpec::phi(2, 3);
  const std::vector<std::size_t> Ns{1, 7, 64, 100};
  const MSEReport a = replicate(GeneratorSpec::sobol(3), ScrambleScheme::owen_nested, f, exact_integral(f), Ns, 30, 9, 1);
  const MSEReport b = replicate(GeneratorSpec::sobol(3), ScrambleScheme::owen_nested, f, exact_integral(f), Ns, 30, 9, 8);
  std::ostringstream sa, sb;
  a.write_csv(sa);
  b.write_csv(sb);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("N,R,mean,variance,mse,exact\n", 0) == 0);
  REQUIRE(a.records.size() == 4);
  for (const auto& r : a.records) {
    CHECK(r.R == 30);
    CHECK(r.exact == 0.203125);
    // mse = (R-1)/R var + bias^2.
    CHECK(r.mse == doctest::Approx(r.variance * 29 / 30 + (r.mean - r.exact) * (r.mean - r.exact)).epsilon(1e-9));
  }
  const auto meta = nlohmann::json::parse(a.metadata_json());
  CHECK(meta.at("seed") == 9);
  CHECK_THROWS_AS(replicate(GeneratorSpec::sobol(3), ScrambleScheme::owen_nested, f, 0.2, Ns, 1, 9), Error);
}

TEST_CASE("prefix estimates match direct recomputation") {
  const IntegrandSpec f = IntegrandSpec::phi(3, 2);
  const std::vector<std::size_t> Ns{5, 16, 33};
  const auto est = replicate_estimates(GeneratorSpec::sobol(2), ScrambleScheme::owen_nested, f, Ns, 3, 21);
  for (std::size_t r = 0; r < 3; ++r) {
    const std::uint64_t seed = rng::derive(21, r);
    const PointSet ps = scramble(generate(GeneratorSpec::sobol(2), 33), ScrambleState(seed));
    for (std::size_t i = 0; i < Ns.size(); ++i) {
      const QuadratureEstimate e = estimate(ps.slice(0, Ns[i]), f, ResidualStream(seed));
      CHECK(est[r][i] == doctest::Approx(e.value).epsilon(1e-13));
    }
  }
}

TEST_CASE("Monte Carlo variance") {
  CHECK(monte_carlo_variance(IntegrandSpec::phi(1, 3), 200000, 4) == doctest::Approx(0.25).epsilon(0.01));
}
