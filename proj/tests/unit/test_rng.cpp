#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "flashsample/errors.hpp"
#include "flashsample/rng.hpp"

using namespace flashsample;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox::philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = philox::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                         {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Uniform, EdgeValuesOfR) {
  EXPECT_DOUBLE_EQ(uniform_from_bits(0).value(), 1.0 / 4294967297.0);
  EXPECT_NEAR(uniform_from_bits(0).value(), 2.328e-10, 1e-13);
  const double top = uniform_from_bits(0xffffffffu).value();
  EXPECT_LT(top, 1.0);
  EXPECT_DOUBLE_EQ(top, 4294967296.0 / 4294967297.0);
  EXPECT_TRUE(std::isfinite(gumbel_from_uniform(uniform_from_bits(0))));
  EXPECT_TRUE(std::isfinite(gumbel_from_uniform(uniform_from_bits(0xffffffffu))));
  EXPECT_TRUE(std::isfinite(gumbel_from_uniform_f32(0)));
  EXPECT_TRUE(std::isfinite(gumbel_from_uniform_f32(0xffffffffu)));
  EXPECT_TRUE(std::isfinite(gumbel_from_uniform_fast(0)));
  EXPECT_TRUE(std::isfinite(gumbel_from_uniform_fast(0xffffffffu)));
}

TEST(Uniform, OpenIntervalEnforced) {
  EXPECT_THROW(UniformOpen01(0.0), DomainError);
  EXPECT_THROW(UniformOpen01(1.0), DomainError);
  EXPECT_THROW(UniformOpen01(-0.5), DomainError);
  EXPECT_THROW(UniformOpen01(std::nan("")), DomainError);
  EXPECT_NO_THROW(UniformOpen01(0.5));
}

TEST(Uniform, Deterministic) {
  const RngKey key{42};
  const StreamIndex idx{3, 17, StreamDomain::GumbelPerTok};
  EXPECT_EQ(derive_uniform(key, idx).value(), derive_uniform(key, idx).value());
  EXPECT_EQ(raw_bits(key, idx), raw_bits(RngKey{42}, StreamIndex{3, 17, StreamDomain::GumbelPerTok}));
}

TEST(Uniform, DomainsDoNotCollide) {
  const RngKey key{7};
  std::mt19937_64 pick(1);
  const StreamDomain domains[] = {StreamDomain::GumbelPerTok, StreamDomain::MergeBernoulli, StreamDomain::OuterGroup,
                                  StreamDomain::BaselineUniform};
  int collisions = 0;
  for (int n = 0; n < 10000; ++n) {
    const auto row = static_cast<std::uint32_t>(pick() % 64);
    const std::uint64_t pos = pick() % 200000;
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        if (derive_uniform(key, {row, pos, domains[a]}).value() == derive_uniform(key, {row, pos, domains[b]}).value()) {
          ++collisions;
        }
      }
    }
  }
  EXPECT_EQ(collisions, 0);
}

TEST(Uniform, KeysAndPositionsSeparate) {
  EXPECT_NE(raw_bits(RngKey{1}, {0, 0}), raw_bits(RngKey{2}, {0, 0}));
  EXPECT_NE(raw_bits(RngKey{1ULL << 32}, {0, 0}), raw_bits(RngKey{0}, {0, 0}));
  EXPECT_NE(raw_bits(RngKey{1}, {0, 1ULL << 32}), raw_bits(RngKey{1}, {0, 0}));
  EXPECT_NE(raw_bits(RngKey{1}, {1, 0}), raw_bits(RngKey{1}, {0, 1}));
}

TEST(Gumbel, ClosedFormPoints) {
  EXPECT_NEAR(gumbel_from_uniform(std::exp(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(gumbel_from_uniform(std::exp(-std::exp(1.0))), -1.0, 1e-14);
  EXPECT_NEAR(gumbel_from_uniform(std::exp(-1.0 / std::exp(1.0))), 1.0, 1e-14);
}

TEST(Gumbel, RejectsOutOfRange) {
  EXPECT_THROW(gumbel_from_uniform(0.0), DomainError);
  EXPECT_THROW(gumbel_from_uniform(1.0), DomainError);
  EXPECT_THROW(gumbel_from_uniform(1.5), DomainError);
}

TEST(Gumbel, GumbelAtRequiresTokenDomain) {
  EXPECT_THROW(gumbel_at(RngKey{1}, {0, 0, StreamDomain::OuterGroup}), ContractError);
  EXPECT_THROW(gumbel_at(RngKey{1}, {0, 0, StreamDomain::BaselineUniform}), ContractError);
  EXPECT_EQ(gumbel_at(RngKey{1}, {2, 5, StreamDomain::GumbelPerTok}), token_gumbel(RngKey{1}, 2, 5));
  EXPECT_EQ(gumbel_at(RngKey{1}, {2, 5}),
            gumbel_from_uniform(derive_uniform(RngKey{1}, {2, 5, StreamDomain::GumbelPerTok})));
}

TEST(Gumbel, MomentsOverMillionDraws) {
  const RngKey key{2024};
  constexpr std::size_t n = 1000000;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = token_gumbel(key, static_cast<std::uint32_t>(i / 1000), i % 1000);
    const double d = g - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (g - mean);
  }
  EXPECT_NEAR(mean, 0.5772156649015329, 0.01);
  EXPECT_NEAR(m2 / (n - 1), 1.6449340668482264, 0.02);
}

TEST(Gumbel, ReducedPrecisionModesTrackExact) {
  const RngKey key{5};
  double worst32 = 0.0;
  double worst_fast = 0.0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const std::uint32_t r = raw_bits(key, {0, i});
    const double u = uniform_from_bits(r).value();
    if (u < 0.01 || u > 0.99) continue;
    const double exact = gumbel_from_uniform(u);
    worst32 = std::max(worst32, std::fabs(gumbel_from_uniform_f32(r) - exact));
    worst_fast = std::max(worst_fast, std::fabs(gumbel_from_uniform_fast(r) - exact));
  }
  EXPECT_LT(worst32, 1e-4);
  EXPECT_LT(worst_fast, 0.05);
}

TEST(Gumbel, ModeNamesRoundTrip) {
  for (GumbelMode m : {GumbelMode::Exact64, GumbelMode::Exact32, GumbelMode::Fast32}) {
    EXPECT_EQ(parse_gumbel_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_gumbel_mode("double"), ContractError);
}
