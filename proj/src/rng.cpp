#include "flashsample/rng.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "flashsample/errors.hpp"

namespace flashsample {

std::string_view to_string(StreamDomain domain) {
  switch (domain) {
    case StreamDomain::GumbelPerTok: return "gumbel_per_tok";
    case StreamDomain::MergeBernoulli: return "merge_bernoulli";
    case StreamDomain::OuterGroup: return "outer_group";
    case StreamDomain::BaselineUniform: return "baseline_uniform";
  }
  return "unknown";
}

std::string_view to_string(GumbelMode mode) {
  switch (mode) {
    case GumbelMode::Exact64: return "exact64";
    case GumbelMode::Exact32: return "exact32";
    case GumbelMode::Fast32: return "fast32";
  }
  return "unknown";
}

GumbelMode parse_gumbel_mode(std::string_view text) {
  if (text == "exact64") return GumbelMode::Exact64;
  if (text == "exact32") return GumbelMode::Exact32;
  if (text == "fast32") return GumbelMode::Fast32;
  throw ContractError("unknown gumbel mode '" + std::string(text) + "'");
}

UniformOpen01::UniformOpen01(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw DomainError("uniform variate must lie strictly inside (0,1), got " + std::to_string(value));
  }
}

namespace philox {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline Counter round(const Counter& c, const Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Counter philox4x32_10(Counter ctr, Key key) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    ctr = round(ctr, key);
  }
  return ctr;
}

}  // namespace philox

std::uint32_t raw_bits(RngKey key, const StreamIndex& idx) noexcept {
  const philox::Counter ctr{static_cast<std::uint32_t>(idx.pos),
                            static_cast<std::uint32_t>(idx.pos >> 32), idx.row,
                            static_cast<std::uint32_t>(idx.domain)};
  const philox::Key k{static_cast<std::uint32_t>(key.seed),
                      static_cast<std::uint32_t>(key.seed >> 32)};
  return philox::philox4x32_10(ctr, k)[0];
}

UniformOpen01 uniform_from_bits(std::uint32_t r) noexcept {
  constexpr double kDenominator = 4294967297.0;  // 2^32 + 1
  return UniformOpen01((static_cast<double>(r) + 1.0) / kDenominator);
}

UniformOpen01 derive_uniform(RngKey key, const StreamIndex& idx) noexcept {
  return uniform_from_bits(raw_bits(key, idx));
}

double gumbel_from_uniform(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("gumbel transform needs u in (0,1), got " + std::to_string(u));
  }
  return -std::log(-std::log(u));
}

namespace {

// Largest float below 1. (r + 1) / (2^32 + 1) rounds to 1.0f for the top
// ~2^8 values of r, so single-precision paths clamp.
constexpr float kBelowOne = 0x1.fffffep-1f;

float uniform_f32(std::uint32_t r) {
  const float u = static_cast<float>(uniform_from_bits(r).value());
  return u < kBelowOne ? u : kBelowOne;
}

// Natural log via exponent extraction and a cubic fit of log2(1 + t) on
// [0, 1). Absolute error around 1e-3.
float fast_logf(float x) {
  const auto bits = std::bit_cast<std::uint32_t>(x);
  const int exponent = static_cast<int>((bits >> 23) & 0xFF) - 127;
  const float t = std::bit_cast<float>((bits & 0x007FFFFFu) | 0x3F800000u) - 1.0f;
  const float log2_mantissa = t * (1.4208645f + t * (-0.5772507f + t * 0.1563862f));
  return (static_cast<float>(exponent) + log2_mantissa) * 0.69314718f;
}

}  // namespace

float gumbel_from_uniform_f32(std::uint32_t r) noexcept {
  return -std::log(-std::log(uniform_f32(r)));
}

float gumbel_from_uniform_fast(std::uint32_t r) noexcept {
  const float inner = -fast_logf(uniform_f32(r));
  // The approximation can return 0 for u near 1; keep the outer log finite.
  return -fast_logf(inner > 1e-30f ? inner : 1e-30f);
}

double token_gumbel(RngKey key, std::uint32_t row, std::uint64_t pos, GumbelMode mode) noexcept {
  const std::uint32_t r = raw_bits(key, {row, pos, StreamDomain::GumbelPerTok});
  switch (mode) {
    case GumbelMode::Exact32: return gumbel_from_uniform_f32(r);
    case GumbelMode::Fast32: return gumbel_from_uniform_fast(r);
    case GumbelMode::Exact64: break;
  }
  return -std::log(-std::log(uniform_from_bits(r).value()));
}

double gumbel_at(RngKey key, const StreamIndex& idx, GumbelMode mode) {
  if (idx.domain != StreamDomain::GumbelPerTok) {
    throw ContractError("gumbel_at requires the GumbelPerTok domain, got " +
                        std::string(to_string(idx.domain)));
  }
  return token_gumbel(key, idx.row, idx.pos, mode);
}

}  // namespace flashsample
