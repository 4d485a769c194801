#include "rqmc/anova.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "rqmc/digits.hpp"
#include "rqmc/error.hpp"
#include "rqmc/parallel.hpp"
#include "rqmc/stats.hpp"

namespace rqmc {

namespace {

constexpr int kMaxDim = 3;
constexpr int kMaxDepth = 12;
constexpr double kMaxGridPoints = 1 << 27;

// Cell of grid point g (per-coordinate grid indices) in the partition with
// cells[a] intervals along coordinate u[a].
std::size_t cell_of(const std::vector<std::size_t>& g, const std::vector<int>& u, const std::vector<std::size_t>& cells,
                    int resolution) {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < u.size(); ++a) {
    const std::size_t per_cell = static_cast<std::size_t>(resolution) / cells[a];
    idx = idx * cells[a] + g[static_cast<std::size_t>(u[a])] / per_cell;
  }
  return idx;
}

void check_key(const AnovaKey& key, int dim) {
  if (key.u.empty()) throw Error("u must be nonempty");
  if (key.u.size() != key.kappa.size()) throw Error("kappa needs one entry per coordinate of u");
  for (std::size_t a = 0; a < key.u.size(); ++a) {
    if (key.u[a] < 0 || key.u[a] >= dim || (a > 0 && key.u[a] <= key.u[a - 1]))
      throw Error("u must be a sorted subset of the coordinates");
    if (key.kappa[a] < 0) throw Error("kappa entries must be non-negative");
  }
}

}  // namespace

int AnovaKey::level() const {
  int l = 0;
  for (int k : kappa) l += k;
  return l;
}

double AnovaTable::tabled_sum() const {
  CompensatedSum acc;
  for (const auto& [key, v] : entries) acc.add(v);
  return acc.value();
}

double AnovaTable::residual() const { return std::max(0.0, sigma2 - tabled_sum()); }

double AnovaTable::level_sum(const std::vector<int>& u, int l) const {
  double acc = 0.0;
  for (const auto& [key, v] : entries)
    if (key.u == u && key.level() == l) acc += v;
  return acc;
}

double AnovaTable::at(const AnovaKey& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) throw Error("entry not in table");
  return it->second;
}

std::string AnovaTable::to_json() const {
  nlohmann::json j;
  j["base"] = base;
  j["dim"] = dim;
  j["depth"] = depth;
  j["sigma2"] = sigma2;
  j["residual"] = residual();
  auto& list = j["entries"] = nlohmann::json::array();
  for (const auto& [key, v] : entries) list.push_back({{"u", key.u}, {"kappa", key.kappa}, {"value", v}});
  return j.dump(2);
}

AnovaTable AnovaTable::from_json(const std::string& text) {
  AnovaTable t;
  try {
    const auto j = nlohmann::json::parse(text);
    t.base = j.at("base").get<int>();
    t.dim = j.at("dim").get<int>();
    t.depth = j.at("depth").get<int>();
    t.sigma2 = j.at("sigma2").get<double>();
    for (const auto& e : j.at("entries"))
      t.entries[{e.at("u").get<std::vector<int>>(), e.at("kappa").get<std::vector<int>>()}] = e.at("value").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed ANOVA table: ") + e.what());
  }
  return t;
}

double box_mean(const Integrand& f, const BAryBox& box, int resolution) {
  if (resolution < 1) throw Error("resolution must be at least 1");
  const std::size_t s = box.depth.size();
  if (box.index.size() != s) throw Error("malformed box");
  std::vector<double> lo(s), width(s);
  for (std::size_t j = 0; j < s; ++j) {
    const double cell = std::pow(static_cast<double>(box.base), -box.depth[j]);
    lo[j] = static_cast<double>(box.index[j]) * cell;
    width[j] = cell / resolution;
  }
  std::vector<int> g(s, 0);
  std::vector<double> x(s);
  CompensatedSum acc;
  std::size_t count = 0;
  while (true) {
    for (std::size_t j = 0; j < s; ++j) x[j] = lo[j] + (g[j] + 0.5) * width[j];
    acc.add(f(x));
    ++count;
    std::size_t j = s;
    while (j > 0 && ++g[j - 1] == resolution) g[--j] = 0;
    if (j == 0) break;
  }
  return acc.value() / static_cast<double>(count);
}

MidpointGrid::MidpointGrid(const Integrand& f, int dim, int resolution, int threads)
    : dim_(dim), resolution_(resolution) {
  if (dim < 1 || dim > kMaxDim) throw Error("ANOVA tables support 1 <= s <= 3");
  if (resolution < 1) throw Error("resolution must be at least 1");
  const double total = std::pow(static_cast<double>(resolution), dim);
  if (total > kMaxGridPoints) throw Error("midpoint grid too large");
  values_.resize(static_cast<std::size_t>(total));
  const auto R = static_cast<std::size_t>(resolution);
  // One row (last coordinate varying) per task.
  const std::size_t rows = values_.size() / R;
  parallel_for(rows, threads, [&](std::size_t row) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    std::size_t rest = row;
    for (int j = dim - 2; j >= 0; --j) {
      x[static_cast<std::size_t>(j)] = (static_cast<double>(rest % R) + 0.5) / resolution;
      rest /= R;
    }
    for (std::size_t i = 0; i < R; ++i) {
      x.back() = (static_cast<double>(i) + 0.5) / resolution;
      values_[row * R + i] = f(x);
    }
  });
}

double MidpointGrid::mean() const {
  CompensatedSum acc;
  for (double v : values_) acc.add(v);
  return acc.value() / static_cast<double>(values_.size());
}

double MidpointGrid::variance() const {
  const double m = mean();
  CompensatedSum acc;
  for (double v : values_) acc.add((v - m) * (v - m));
  return acc.value() / static_cast<double>(values_.size());
}

std::vector<double> haar_component(const MidpointGrid& grid, int base, const AnovaKey& key) {
  require_base(base);
  check_key(key, grid.dim());
  const auto b = static_cast<std::size_t>(base);
  const auto R = static_cast<std::size_t>(grid.resolution());
  const std::size_t na = key.u.size();
  std::vector<std::size_t> cells(na);
  std::size_t total = 1;
  for (std::size_t a = 0; a < na; ++a) {
    const int d = key.kappa[a] + 1;
    if (d > max_depth(base)) throw Error("under-resolved: depth beyond digit range");
    cells[a] = static_cast<std::size_t>(ipow(b, d));
    if (R % cells[a] != 0) throw Error("under-resolved: resolution must be a multiple of b^(kappa_j+1)");
    total *= cells[a];
  }
  // Cell means of f at depths kappa_j + 1 (coordinates outside u averaged).
  std::vector<double> nu(total, 0.0);
  const auto values = grid.values();
  std::vector<std::size_t> g(static_cast<std::size_t>(grid.dim()), 0);
  for (std::size_t p = 0; p < values.size(); ++p) {
    std::size_t rest = p;
    for (int j = grid.dim() - 1; j >= 0; --j) {
      g[static_cast<std::size_t>(j)] = rest % R;
      rest /= R;
    }
    nu[cell_of(g, key.u, cells, grid.resolution())] += values[p];
  }
  const double per = static_cast<double>(values.size()) / static_cast<double>(total);
  for (double& v : nu) v /= per;
  // Apply (I - A_j) along each coordinate of u, where A_j replaces a cell
  // mean by the mean of its b siblings (the parent at depth kappa_j).
  std::size_t stride = 1;
  for (std::size_t a = na; a-- > 0;) {
    const std::size_t n = cells[a];
    for (std::size_t base_idx = 0; base_idx < total; ++base_idx) {
      // Visit each sibling group once: its first member has digit 0 in the
      // last place of coordinate a.
      const std::size_t coord = (base_idx / stride) % n;
      if (coord % b != 0) continue;
      double parent = 0.0;
      for (std::size_t c = 0; c < b; ++c) parent += nu[base_idx + c * stride];
      parent /= static_cast<double>(b);
      for (std::size_t c = 0; c < b; ++c) nu[base_idx + c * stride] -= parent;
    }
    stride *= n;
  }
  return nu;
}

double sigma_uk(const MidpointGrid& grid, int base, const AnovaKey& key) {
  const auto nu = haar_component(grid, base, key);
  CompensatedSum acc;
  for (double v : nu) acc.add(v * v);
  return acc.value() / static_cast<double>(nu.size());
}

double sigma_uk(const Integrand& f, int dim, int base, const AnovaKey& key, int resolution) {
  check_key(key, dim);
  require_base(base);
  for (int k : key.kappa) {
    const double cells = std::pow(static_cast<double>(base), k + 1);
    if (cells > resolution || resolution % static_cast<int>(cells) != 0)
      throw Error("under-resolved: resolution must be a multiple of b^(kappa_j+1)");
  }
  return sigma_uk(MidpointGrid(f, dim, resolution), base, key);
}

double haar_inner_product(const MidpointGrid& grid, int base, const AnovaKey& a, const AnovaKey& b) {
  const auto na = haar_component(grid, base, a);
  const auto nb = haar_component(grid, base, b);
  const auto R = static_cast<std::size_t>(grid.resolution());
  const auto ub = static_cast<std::size_t>(base);
  auto cells_of = [&](const AnovaKey& k) {
    std::vector<std::size_t> c;
    for (int d : k.kappa) c.push_back(static_cast<std::size_t>(ipow(ub, d + 1)));
    return c;
  };
  const auto ca = cells_of(a), cb = cells_of(b);
  std::size_t total = 1;
  for (int j = 0; j < grid.dim(); ++j) total *= R;
  std::vector<std::size_t> g(static_cast<std::size_t>(grid.dim()));
  CompensatedSum acc;
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rest = p;
    for (int j = grid.dim() - 1; j >= 0; --j) {
      g[static_cast<std::size_t>(j)] = rest % R;
      rest /= R;
    }
    acc.add(na[cell_of(g, a.u, ca, grid.resolution())] * nb[cell_of(g, b.u, cb, grid.resolution())]);
  }
  return acc.value() / static_cast<double>(total);
}

AnovaTable build_anova_table(const Integrand& f, int dim, int base, int depth, int resolution,
                             std::optional<double> sigma2, int threads) {
  require_base(base);
  if (dim < 1 || dim > kMaxDim) throw Error("ANOVA tables support 1 <= s <= 3");
  if (depth < 0 || depth > kMaxDepth) throw Error("ANOVA tables support 0 <= K <= 12");
  const double finest = std::pow(static_cast<double>(base), depth + 1);
  if (finest > resolution || std::fmod(static_cast<double>(resolution), finest) != 0.0)
    throw Error("under-resolved: resolution must be a multiple of b^(K+1)");
  const MidpointGrid grid(f, dim, resolution, threads);

  std::vector<AnovaKey> keys;
  for (int mask = 1; mask < (1 << dim); ++mask) {
    AnovaKey key;
    for (int j = 0; j < dim; ++j)
      if (mask & (1 << j)) key.u.push_back(j);
    key.kappa.assign(key.u.size(), 0);
    // All kappa with |kappa| <= K, odometer over the entries.
    while (true) {
      keys.push_back(key);
      std::size_t a = key.kappa.size();
      bool advanced = false;
      while (a > 0) {
        --a;
        ++key.kappa[a];
        if (key.level() <= depth) {
          advanced = true;
          break;
        }
        key.kappa[a] = 0;
      }
      if (!advanced) break;
    }
  }
  std::vector<double> values(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t i) { values[i] = sigma_uk(grid, base, keys[i]); });

  AnovaTable table;
  table.base = base;
  table.dim = dim;
  table.depth = depth;
  table.sigma2 = sigma2 ? *sigma2 : grid.variance();
  for (std::size_t i = 0; i < keys.size(); ++i) table.entries[keys[i]] = values[i];
  return table;
}

double gain_factor_bound(int t, int s, int b) {
  require_base(b);
  if (t < 0 || s < 1) throw Error("gain factor needs t >= 0 and s >= 1");
  if (t == 0) {
    if (b < s) throw Error("no (0,s)-sequence exists in this base");
    return std::numbers::e;
  }
  return std::pow(static_cast<double>(b), t) * std::pow((b + 1.0) / (b - 1.0), s);
}

double c_b(int b) {
  require_base(b);
  return std::sqrt(b - 1.0) / (std::sqrt(static_cast<double>(b)) - 1.0);
}

double b_term(const AnovaTable& table, int k, int c) {
  // For each u with L = k - c - |u|: the tail sum over |kappa| > L plus
  // b^-L sum_{|kappa| <= L} sigma^2 b^|kappa|. The residual (untabled) mass
  // sits at |kappa| > K >= L and therefore belongs to the tail.
  const double b = table.base;
  CompensatedSum acc;
  for (const auto& [key, v] : table.entries) {
    const int L = k - c - static_cast<int>(key.u.size());
    const int l = key.level();
    if (l > L)
      acc.add(v);
    else
      acc.add(std::pow(b, l - L) * v);
  }
  acc.add(table.residual());
  return acc.value();
}

double theorem1_bound(const AnovaTable& table, std::uint64_t N, int t, int base, int dim) {
  if (N < 1) throw Error("N must be at least 1");
  if (base != table.base || dim != table.dim) throw Error("table does not match base and dimension");
  const int k = digit_count(N, base) - 1;
  if (table.depth < k) throw Error("table too shallow");
  const double gamma = gain_factor_bound(t, dim, base);
  const double cb = c_b(base);
  const double b = base;
  CompensatedSum third;
  for (const auto& [key, v] : table.entries) {
    const int L = k - 1 - t - static_cast<int>(key.u.size());
    const int l = key.level();
    if (l <= L) third.add(std::pow(b, -(L - l) / 2.0) * v);
  }
  const double braces = (1.0 + cb) * b_term(table, k, t) + cb * (b_term(table, k, t + 1) + third.value());
  const double n = static_cast<double>(N);
  return 2.0 * gamma / n * braces + std::pow(b, 2 * t) * table.sigma2 / (n * n);
}

}  // namespace rqmc
