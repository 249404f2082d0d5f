#pragma once

// Counter-based random streams addressed by logical output position.
//
// Every random draw in the library is a pure function of (key, row, pos,
// domain). Nothing is sequential, so any tiling, grouping, or thread schedule
// that visits the same logical position sees the same number.

#include <array>
#include <cstdint>
#include <string_view>

namespace flashsample {

struct RngKey {
  std::uint64_t seed = 0;

  friend bool operator==(const RngKey&, const RngKey&) = default;
};

// Domain tags separate the counter spaces of independent random consumers.
enum class StreamDomain : std::uint32_t {
  GumbelPerTok = 1,     // per-token perturbation g_{b,i}
  MergeBernoulli = 2,   // online merge coin at (b, group_id)
  OuterGroup = 3,       // outer group / shard selection at (b, k)
  BaselineUniform = 4,  // single inverse-CDF uniform at (b, 0)
};

std::string_view to_string(StreamDomain domain);

struct StreamIndex {
  std::uint32_t row = 0;
  std::uint64_t pos = 0;
  StreamDomain domain = StreamDomain::GumbelPerTok;

  friend bool operator==(const StreamIndex&, const StreamIndex&) = default;
};

// Strictly inside (0, 1); the constructor enforces it.
class UniformOpen01 {
 public:
  explicit UniformOpen01(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

enum class GumbelMode {
  Exact64,  // double precision, std::log (default, used for all exactness checks)
  Exact32,  // single precision, std::log on floats
  Fast32,   // single precision, polynomial log approximation; not exact
};

std::string_view to_string(GumbelMode mode);
GumbelMode parse_gumbel_mode(std::string_view text);

namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds.
Counter philox4x32_10(Counter ctr, Key key) noexcept;

}  // namespace philox

// Raw 32-bit generator output for (key, idx).
std::uint32_t raw_bits(RngKey key, const StreamIndex& idx) noexcept;

// u = (r + 1) / (2^32 + 1), which is never 0 or 1.
UniformOpen01 uniform_from_bits(std::uint32_t r) noexcept;

UniformOpen01 derive_uniform(RngKey key, const StreamIndex& idx) noexcept;

// -log(-log u). Throws DomainError when u is not inside (0, 1).
double gumbel_from_uniform(double u);
inline double gumbel_from_uniform(UniformOpen01 u) { return gumbel_from_uniform(u.value()); }

// Reduced-precision variants. The result is widened to double for
// comparison but carries only float accuracy.
float gumbel_from_uniform_f32(std::uint32_t r) noexcept;
float gumbel_from_uniform_fast(std::uint32_t r) noexcept;

// Per-token Gumbel noise. idx.domain must be GumbelPerTok (ContractError
// otherwise).
double gumbel_at(RngKey key, const StreamIndex& idx, GumbelMode mode = GumbelMode::Exact64);

// Per-token noise at (row, pos) without the domain check, for hot loops.
double token_gumbel(RngKey key, std::uint32_t row, std::uint64_t pos,
                    GumbelMode mode = GumbelMode::Exact64) noexcept;

}  // namespace flashsample
