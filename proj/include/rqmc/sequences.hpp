#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rqmc/point_set.hpp"

namespace rqmc {

/// One row of a Sobol' direction-number table: `d s a m_1 ... m_s`.
struct DirectionEntry {
  int d = 0;           // dimension index, starting at 2
  int s = 0;           // degree of the primitive polynomial
  std::uint32_t a = 0; // interior polynomial coefficients, leading term first
  std::vector<std::uint32_t> m;  // initial direction integers

  friend bool operator==(const DirectionEntry&, const DirectionEntry&) = default;
};

struct DirectionTable {
  std::vector<DirectionEntry> entries;

  /// Highest Sobol' dimension the table supports (the first is implicit).
  int max_dim() const noexcept { return static_cast<int>(entries.size()) + 1; }
};

/// Parses the whitespace-separated table format with its `d s a m_i` header.
DirectionTable parse_direction_table(std::istream& in);
DirectionTable parse_direction_table(const std::string& text);
std::string format_direction_table(const DirectionTable& table);

/// The Joe-Kuo (D6) table shipped in data/joe_kuo_d6.txt.
const DirectionTable& bundled_direction_table();
const std::string& bundled_direction_text();

enum class SequenceKind { van_der_corput, sobol, faure };

std::string to_string(SequenceKind kind);
SequenceKind parse_sequence_kind(const std::string& name);

struct GeneratorSpec {
  SequenceKind kind = SequenceKind::sobol;
  int base = 2;
  int dim = 1;
  std::shared_ptr<const DirectionTable> directions;  // Sobol' only; bundled table when null

  static GeneratorSpec van_der_corput(int base);
  static GeneratorSpec sobol(int dim, std::shared_ptr<const DirectionTable> table = nullptr);
  static GeneratorSpec faure(int base, int dim);

  /// Throws "unsupported dimension", "base not prime", ... on invalid specs.
  void validate() const;
  const DirectionTable& table() const;
  int depth() const;
};

bool is_prime(int n);

/// Quality parameter of the first `dim` Sobol' coordinates: sum of
/// (degree - 1) over the primitive polynomials, the first coordinate counting
/// as degree one.
int sobol_t_value(int dim, const DirectionTable& table);

/// The 32 direction integers v_1..v_32 of Sobol' coordinate j (0-based).
std::array<std::uint32_t, 32> sobol_direction_vectors(int j, const DirectionTable& table);

/// Generator matrix of Faure coordinate j in base b: P^j mod b with P the
/// upper-triangular Pascal matrix, truncated to depth x depth (row-major).
std::vector<Digit> faure_matrix(int base, int j, int depth);

/// First N points of the sequence (indices 0..N-1). Deterministic.
PointSet generate(const GeneratorSpec& spec, std::size_t count);

/// Points with indices [begin, end).
PointSet generate_range(const GeneratorSpec& spec, std::uint64_t begin, std::uint64_t end);

}  // namespace rqmc
