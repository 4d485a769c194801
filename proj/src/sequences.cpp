#include "rqmc/sequences.hpp"

#include <bit>
#include <istream>
#include <sstream>

#include "rqmc/error.hpp"

namespace rqmc {

namespace detail {
const std::string& embedded_direction_text();
}

namespace {

constexpr int kSobolBits = 32;

void check_entry(const DirectionEntry& e, int expected_d) {
  const std::string where = "direction table row d=" + std::to_string(e.d);
  if (e.d != expected_d) throw Error(where + ": rows must be consecutive from d=2");
  if (e.s < 1 || e.s >= kSobolBits) throw Error(where + ": bad degree");
  if (e.a >= (1U << (e.s - 1))) throw Error(where + ": coefficient out of range");
  if (static_cast<int>(e.m.size()) != e.s) throw Error(where + ": expected s initial direction integers");
  for (std::size_t i = 0; i < e.m.size(); ++i) {
    const std::uint32_t m = e.m[i];
    if ((m & 1U) == 0 || m >= (1U << (i + 1))) throw Error(where + ": m_i must be odd and below 2^i");
  }
}

}  // namespace

DirectionTable parse_direction_table(std::istream& in) {
  DirectionTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string first;
    if (!(row >> first)) continue;
    if (!header_seen && first == "d") {
      header_seen = true;
      continue;
    }
    DirectionEntry e;
    try {
      e.d = std::stoi(first);
    } catch (const std::exception&) {
      throw Error("malformed direction table line: " + line);
    }
    long long a = -1;
    if (!(row >> e.s >> a) || a < 0) throw Error("malformed direction table line: " + line);
    e.a = static_cast<std::uint32_t>(a);
    long long m = 0;
    while (row >> m) {
      if (m <= 0) throw Error("malformed direction table line: " + line);
      e.m.push_back(static_cast<std::uint32_t>(m));
    }
    if (!row.eof()) throw Error("malformed direction table line: " + line);
    check_entry(e, static_cast<int>(table.entries.size()) + 2);
    table.entries.push_back(std::move(e));
  }
  return table;
}

DirectionTable parse_direction_table(const std::string& text) {
  std::istringstream in(text);
  return parse_direction_table(in);
}

std::string format_direction_table(const DirectionTable& table) {
  std::ostringstream out;
  out << "d       s       a       m_i\n";
  for (const auto& e : table.entries) {
    out << e.d << "       " << e.s << "       " << e.a << "       ";
    for (std::size_t i = 0; i < e.m.size(); ++i) out << e.m[i] << (i + 1 == e.m.size() ? "" : " ");
    out << " \n";
  }
  return out.str();
}

const std::string& bundled_direction_text() { return detail::embedded_direction_text(); }

const DirectionTable& bundled_direction_table() {
  static const DirectionTable table = parse_direction_table(bundled_direction_text());
  return table;
}

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::van_der_corput: return "vdc";
    case SequenceKind::sobol: return "sobol";
    case SequenceKind::faure: return "faure";
  }
  return "unknown";
}

SequenceKind parse_sequence_kind(const std::string& name) {
  if (name == "vdc" || name == "van_der_corput") return SequenceKind::van_der_corput;
  if (name == "sobol") return SequenceKind::sobol;
  if (name == "faure") return SequenceKind::faure;
  throw Error("unknown generator '" + name + "'");
}

GeneratorSpec GeneratorSpec::van_der_corput(int base) {
  return GeneratorSpec{SequenceKind::van_der_corput, base, 1, nullptr};
}

GeneratorSpec GeneratorSpec::sobol(int dim, std::shared_ptr<const DirectionTable> table) {
  return GeneratorSpec{SequenceKind::sobol, 2, dim, std::move(table)};
}

GeneratorSpec GeneratorSpec::faure(int base, int dim) { return GeneratorSpec{SequenceKind::faure, base, dim, nullptr}; }

const DirectionTable& GeneratorSpec::table() const { return directions ? *directions : bundled_direction_table(); }

int GeneratorSpec::depth() const { return default_depth(base); }

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void GeneratorSpec::validate() const {
  if (dim < 1) throw Error("dimension must be at least 1");
  switch (kind) {
    case SequenceKind::van_der_corput:
      require_base(base);
      if (dim != 1) throw Error("unsupported dimension");
      break;
    case SequenceKind::sobol:
      if (base != 2) throw Error("Sobol' sequences are base 2");
      if (dim > table().max_dim()) throw Error("unsupported dimension");
      break;
    case SequenceKind::faure:
      if (!is_prime(base)) throw Error("base not prime");
      if (base < dim) throw Error("Faure sequences need base >= dim");
      break;
  }
}

int sobol_t_value(int dim, const DirectionTable& table) {
  if (dim < 1 || dim > table.max_dim()) throw Error("unsupported dimension");
  int t = 0;
  for (int j = 1; j < dim; ++j) t += table.entries[static_cast<std::size_t>(j - 1)].s - 1;
  return t;
}

std::array<std::uint32_t, 32> sobol_direction_vectors(int j, const DirectionTable& table) {
  if (j < 0 || j >= table.max_dim()) throw Error("unsupported dimension");
  std::array<std::uint32_t, 32> v{};
  if (j == 0) {
    for (int l = 0; l < kSobolBits; ++l) v[static_cast<std::size_t>(l)] = 1U << (kSobolBits - 1 - l);
    return v;
  }
  const DirectionEntry& e = table.entries[static_cast<std::size_t>(j - 1)];
  const int s = e.s;
  for (int l = 0; l < s; ++l) v[static_cast<std::size_t>(l)] = e.m[static_cast<std::size_t>(l)] << (kSobolBits - 1 - l);
  // Bratley-Fox recurrence on the left-aligned direction integers.
  for (int l = s; l < kSobolBits; ++l) {
    std::uint32_t x = v[static_cast<std::size_t>(l - s)] ^ (v[static_cast<std::size_t>(l - s)] >> s);
    for (int k = 1; k < s; ++k)
      if ((e.a >> (s - 1 - k)) & 1U) x ^= v[static_cast<std::size_t>(l - k)];
    v[static_cast<std::size_t>(l)] = x;
  }
  return v;
}

std::vector<Digit> faure_matrix(int base, int j, int depth) {
  // C_j[r][c] = binom(c, r) * j^(c-r) mod b for c >= r.
  const auto b = static_cast<std::uint64_t>(base);
  const auto sz = static_cast<std::size_t>(depth);
  std::vector<std::uint64_t> binom(sz * sz, 0);
  for (std::size_t c = 0; c < sz; ++c) {
    binom[c * sz + 0] = 1;
    for (std::size_t r = 1; r <= c; ++r)
      binom[c * sz + r] = (binom[(c - 1) * sz + r - 1] + (r <= c - 1 ? binom[(c - 1) * sz + r] : 0)) % b;
  }
  std::vector<std::uint64_t> jpow(sz, 1);
  for (std::size_t e = 1; e < sz; ++e) jpow[e] = jpow[e - 1] * (static_cast<std::uint64_t>(j) % b) % b;
  std::vector<Digit> m(sz * sz, 0);
  for (std::size_t r = 0; r < sz; ++r)
    for (std::size_t c = r; c < sz; ++c) m[r * sz + c] = static_cast<Digit>(binom[c * sz + r] * jpow[c - r] % b);
  return m;
}

namespace {

PointSet generate_sobol(const GeneratorSpec& spec, std::uint64_t begin, std::uint64_t end) {
  if (end > (std::uint64_t{1} << kSobolBits)) throw Error("index beyond sequence depth");
  const std::size_t count = end - begin;
  PointSet ps(2, spec.dim, count, kSobolBits, sobol_t_value(spec.dim, spec.table()));
  for (int j = 0; j < spec.dim; ++j) {
    const auto v = sobol_direction_vectors(j, spec.table());
    // w[c] = v_0 ^ ... ^ v_c: going from n-1 to n flips bits 0..ctz(n).
    std::array<std::uint32_t, 32> w{};
    std::uint32_t acc = 0;
    for (int c = 0; c < kSobolBits; ++c) w[static_cast<std::size_t>(c)] = acc ^= v[static_cast<std::size_t>(c)];
    std::uint32_t x = 0;
    for (int bit = 0; bit < kSobolBits; ++bit)
      if ((begin >> bit) & 1U) x ^= v[static_cast<std::size_t>(bit)];
    auto col = ps.column(j);
    for (std::size_t i = 0; i < count; ++i) {
      if (i > 0) x ^= w[static_cast<std::size_t>(std::countr_zero(begin + i))];
      col[i] = x;
    }
  }
  return ps;
}

PointSet generate_digital(const GeneratorSpec& spec, std::uint64_t begin, std::uint64_t end) {
  const int depth = spec.depth();
  const std::uint64_t scale = ipow(static_cast<std::uint64_t>(spec.base), depth);
  if (end > scale) throw Error("index beyond sequence depth");
  const std::size_t count = end - begin;
  PointSet ps(spec.base, spec.dim, count, depth, 0);
  const auto b = static_cast<std::uint64_t>(spec.base);
  const auto sz = static_cast<std::size_t>(depth);
  std::vector<Digit> a(sz);
  std::vector<std::uint64_t> place(sz);
  for (std::size_t r = 0; r < sz; ++r) place[r] = ipow(b, depth - 1 - static_cast<int>(r));
  for (int j = 0; j < spec.dim; ++j) {
    const std::vector<Digit> m = faure_matrix(spec.base, j, depth);
    auto col = ps.column(j);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t n = begin + i;
      std::size_t len = 0;
      for (; n > 0; n /= b) a[len++] = static_cast<Digit>(n % b);
      std::uint64_t word = 0;
      for (std::size_t r = 0; r < len; ++r) {
        std::uint64_t y = 0;
        for (std::size_t c = r; c < len; ++c) y += static_cast<std::uint64_t>(m[r * sz + c]) * a[c];
        word += (y % b) * place[r];
      }
      col[i] = word;
    }
  }
  return ps;
}

}  // namespace

PointSet generate_range(const GeneratorSpec& spec, std::uint64_t begin, std::uint64_t end) {
  spec.validate();
  if (end <= begin) throw Error("point count must be at least 1");
  // Van der Corput is the first Faure coordinate; both run through the
  // generic digital construction.
  if (spec.kind == SequenceKind::sobol) return generate_sobol(spec, begin, end);
  return generate_digital(spec, begin, end);
}

PointSet generate(const GeneratorSpec& spec, std::size_t count) { return generate_range(spec, 0, count); }

}  // namespace rqmc
