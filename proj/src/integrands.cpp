#include "rqmc/integrands.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "rqmc/error.hpp"

namespace rqmc {

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, std::function<IntegrandSpec(int)>> factories;
};

Registry& registry() {
  static Registry r;
  return r;
}

long double factorial(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

__int128 binomial_int(int n, int k) {
  __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr int kExactIrwinHallMaxDim = 20;

}  // namespace

IntegrandSpec IntegrandSpec::phi(int which, int dim) {
  if (dim < 1) throw Error("dimension must be at least 1");
  IntegrandSpec spec;
  spec.dim = dim;
  const double half_s = 0.5 * dim;
  switch (which) {
    case 1:
      spec.id = IntegrandId::phi1;
      spec.name = "phi1";
      spec.fn = [](std::span<const double> x) {
        double acc = 0.0;
        for (double v : x) acc += v;
        return acc;
      };
      break;
    case 2:
      spec.id = IntegrandId::phi2;
      spec.name = "phi2";
      spec.fn = [half_s](std::span<const double> x) {
        double acc = 0.0;
        for (double v : x) acc += v;
        return std::max(acc - half_s, 0.0);
      };
      break;
    case 3:
      spec.id = IntegrandId::phi3;
      spec.name = "phi3";
      spec.fn = [half_s](std::span<const double> x) {
        double acc = 0.0;
        for (double v : x) acc += v;
        return acc > half_s ? 1.0 : 0.0;
      };
      break;
    case 4: {
      spec.id = IntegrandId::phi4;
      spec.name = "phi4";
      const double scale = std::pow(12.0, half_s);
      spec.fn = [scale](std::span<const double> x) {
        double acc = 1.0;
        for (double v : x) acc *= v - 0.5;
        return acc * scale;
      };
      break;
    }
    default:
      throw Error("unknown integrand phi" + std::to_string(which));
  }
  return spec;
}

IntegrandSpec IntegrandSpec::custom(std::string name, int dim, std::function<double(std::span<const double>)> fn,
                                    std::optional<double> integral, std::optional<double> variance) {
  if (dim < 1) throw Error("dimension must be at least 1");
  if (!fn) throw Error("custom integrand needs a function");
  return IntegrandSpec{IntegrandId::custom, dim, std::move(name), std::move(fn), integral, variance};
}

std::optional<kernels::ReductionParams> IntegrandSpec::reduction() const {
  const double half_s = 0.5 * dim;
  switch (id) {
    case IntegrandId::phi1: return kernels::ReductionParams{kernels::Reduction::sum, 0.0, 1.0};
    case IntegrandId::phi2: return kernels::ReductionParams{kernels::Reduction::hinge, half_s, 1.0};
    case IntegrandId::phi3: return kernels::ReductionParams{kernels::Reduction::indicator, half_s, 1.0};
    case IntegrandId::phi4:
      return kernels::ReductionParams{kernels::Reduction::centered_product, 0.0, std::pow(12.0, half_s)};
    case IntegrandId::custom: return std::nullopt;
  }
  return std::nullopt;
}

double evaluate(const IntegrandSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dim) throw Error("dimension mismatch");
  return spec.fn(x);
}

void evaluate_batch(const IntegrandSpec& spec, std::span<const double> cols, std::size_t count, std::span<double> out) {
  if (cols.size() < count * static_cast<std::size_t>(spec.dim) || out.size() < count) throw Error("dimension mismatch");
  if (const auto red = spec.reduction()) {
    kernels::evaluate(*red, cols, count, spec.dim, out);
    return;
  }
  std::vector<double> x(static_cast<std::size_t>(spec.dim));
  for (std::size_t n = 0; n < count; ++n) {
    for (int j = 0; j < spec.dim; ++j) x[static_cast<std::size_t>(j)] = cols[static_cast<std::size_t>(j) * count + n];
    out[n] = spec.fn(x);
  }
}

double irwin_hall_cdf(int s, double x) {
  if (s < 1) throw Error("Irwin-Hall needs s >= 1");
  if (x <= 0.0) return 0.0;
  if (x >= s) return 1.0;
  long double acc = 0.0L;
  for (int k = 0; k <= static_cast<int>(std::floor(x)); ++k) {
    const long double term = static_cast<long double>(binomial_int(s, k)) * std::pow(static_cast<long double>(x) - k, s);
    acc += (k % 2 == 0) ? term : -term;
  }
  return static_cast<double>(acc / factorial(s));
}

double irwin_hall_lower_moment(int s, double a, int r) {
  if (s < 1 || r < 0) throw Error("Irwin-Hall needs s >= 1 and r >= 0");
  if (a <= 0.0) return 0.0;
  const double twice = 2.0 * a;
  if (s <= kExactIrwinHallMaxDim && twice == std::floor(twice) && a <= s) {
    // (a-k) = (2a - 2k)/2: accumulate the integer numerator exactly.
    const auto two_a = static_cast<long long>(twice);
    __int128 num = 0;
    for (int k = 0; 2LL * k < two_a; ++k) {
      __int128 p = 1;
      for (int e = 0; e < s + r; ++e) p *= (two_a - 2LL * k);
      const __int128 term = binomial_int(s, k) * p;
      num += (k % 2 == 0) ? term : -term;
    }
    const long double denom = factorial(s + r) * std::pow(2.0L, s + r);
    return static_cast<double>(factorial(r) * static_cast<long double>(num) / denom);
  }
  long double acc = 0.0L;
  for (int k = 0; k < a && k <= s; ++k) {
    const long double term = static_cast<long double>(binomial_int(s, k)) * std::pow(static_cast<long double>(a) - k, s + r);
    acc += (k % 2 == 0) ? term : -term;
  }
  return static_cast<double>(factorial(r) * acc / factorial(s + r));
}

double exact_integral(const IntegrandSpec& spec) {
  switch (spec.id) {
    case IntegrandId::phi1: return 0.5 * spec.dim;
    case IntegrandId::phi2:
      // S and s - S share a law, so E(S - s/2)_+ = E(s/2 - S)_+.
      return irwin_hall_lower_moment(spec.dim, 0.5 * spec.dim, 1);
    case IntegrandId::phi3: return 0.5;
    case IntegrandId::phi4: return 0.0;
    case IntegrandId::custom:
      if (spec.integral) return *spec.integral;
      throw Error("no reference value");
  }
  throw Error("no reference value");
}

double exact_variance(const IntegrandSpec& spec) {
  switch (spec.id) {
    case IntegrandId::phi1: return spec.dim / 12.0;
    case IntegrandId::phi2: {
      const double m1 = irwin_hall_lower_moment(spec.dim, 0.5 * spec.dim, 1);
      const double m2 = irwin_hall_lower_moment(spec.dim, 0.5 * spec.dim, 2);
      return m2 - m1 * m1;
    }
    case IntegrandId::phi3: return 0.25;
    case IntegrandId::phi4: return 1.0;
    case IntegrandId::custom:
      if (spec.variance) return *spec.variance;
      throw Error("no reference value");
  }
  throw Error("no reference value");
}

void register_integrand(const std::string& name, std::function<IntegrandSpec(int dim)> factory) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.factories[name] = std::move(factory);
}

IntegrandSpec make_integrand(const std::string& name, int dim) {
  if (name.size() == 4 && name.rfind("phi", 0) == 0 && name[3] >= '1' && name[3] <= '4')
    return IntegrandSpec::phi(name[3] - '0', dim);
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  const auto it = r.factories.find(name);
  if (it == r.factories.end()) throw Error("unknown integrand '" + name + "'");
  return it->second(dim);
}

}  // namespace rqmc
