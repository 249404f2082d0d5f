#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "flashsample/cost_model.hpp"
#include "flashsample/errors.hpp"

using namespace flashsample;
using namespace flashsample::cost;

TEST(CostModel, IntensityExamples) {
  const CostInputs c{1, 151936, 4096, 2};
  EXPECT_NEAR(intensity_materialized(c), 0.9995053817996126, 1e-15);
  EXPECT_NEAR(intensity_fused(c), 0.9999934183247004, 1e-15);
  EXPECT_GT(intensity_fused(c), intensity_materialized(c));
}

TEST(CostModel, ExtraTrafficPercentages) {
  EXPECT_EQ(format_percent(extra_traffic_fraction(1, 4096)), "0.049");
  EXPECT_EQ(format_percent(extra_traffic_fraction(64, 4096)), "3.125");
  EXPECT_EQ(format_percent(extra_traffic_fraction(128, 4096)), "6.25");
  EXPECT_EQ(format_percent(0.5), "50");
}

TEST(CostModel, RoundTripExample) {
  const auto r = logits_roundtrip(1, 151936, 8e12);
  EXPECT_EQ(r.bytes, 607744u);
  EXPECT_NEAR(r.seconds * 1e3, 7.6e-05, 5e-7);
  EXPECT_EQ(logits_roundtrip(4, 10, 1.0, 4).bytes, 2u * 4u * 4u * 10u);
}

TEST(CostModel, FusedAlwaysHigherProperty) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const CostInputs c{1 + rng() % 1024, 1 + rng() % 262144, 1 + rng() % 16384, 2};
    const double fused = intensity_fused(c);
    const double mat = intensity_materialized(c);
    EXPECT_GT(fused, mat) << c.batch << " " << c.vocab << " " << c.dim;
    // passes > 1 lowers the materialized intensity further
    EXPECT_LE(intensity_materialized(c, 2.0), mat);
  }
}

TEST(CostModel, LargeDimensionLimit) {
  // as D grows the materialized intensity approaches the fused one
  const double fused = intensity_fused({16, 50000, 1, 2});
  const double far = intensity_materialized({16, 50000, 1u << 30, 2});
  EXPECT_NEAR(far / fused, 1.0, 1e-6);
}

TEST(CostModel, OpsPerByteFromDataFile) {
  const auto specs = load_gpu_specs(default_gpu_spec_path());
  ASSERT_EQ(specs.size(), 4u);
  const double expected[] = {295, 206, 281, 281};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(specs[i].ops_byte_ratio(), expected[i], 1.0) << specs[i].name;
  const auto builtin = default_gpu_specs();
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(builtin[i].name, specs[i].name);
    EXPECT_EQ(builtin[i].ops_byte_ratio(), specs[i].ops_byte_ratio());
  }
}

TEST(CostModel, Roofline) {
  const GpuSpec g{"X", 2.0, 100.0};
  EXPECT_EQ(roofline_point(g, 10.0), 20.0);
  EXPECT_EQ(roofline_point(g, 1000.0), 100.0);
  EXPECT_THROW(roofline_point(g, 0.0), ContractError);
}

TEST(CostModel, TableShape) {
  const auto rows = cost_table(151936, 4096, {1, 64, 128}, default_gpu_specs(), 8e12);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].batch, 64u);
  EXPECT_EQ(rows[2].attainable_fused.size(), 4u);
  EXPECT_EQ(rows[0].roundtrip.bytes, 607744u);
}

TEST(CostModel, Errors) {
  EXPECT_THROW(intensity_materialized({0, 1, 1, 2}), ContractError);
  EXPECT_THROW(intensity_fused({1, 0, 1, 2}), ContractError);
  EXPECT_THROW(intensity_materialized({1, 1, 1, 2}, 0.5), ContractError);
  EXPECT_THROW(extra_traffic_fraction(1, 0), ContractError);
  EXPECT_THROW(logits_roundtrip(1, 1, 0.0), ContractError);
  EXPECT_THROW(load_gpu_specs("/nonexistent/specs.json"), ContractError);

  const auto path = std::filesystem::temp_directory_path() / "flashsample_bad_specs.json";
  {
    std::ofstream out(path);
    out << R"([{"name":"bad","hbm_bandwidth_tbps":0,"peak_tflops":1}])";
  }
  EXPECT_THROW(load_gpu_specs(path), ContractError);
  std::filesystem::remove(path);
}
