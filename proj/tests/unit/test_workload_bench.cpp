#include <gtest/gtest.h>

#include "flashsample/bench.hpp"
#include "flashsample/errors.hpp"
#include "flashsample/workload.hpp"
#include "json.hpp"

using namespace flashsample;

namespace {

WorkloadConfig small_cfg() {
  WorkloadConfig cfg;
  cfg.batch = 3;
  cfg.vocab = 200;
  cfg.dim = 16;
  cfg.seed = 7;
  cfg.tiling = {32, 2, 8};
  cfg.group_size = 16;
  cfg.world_size = 3;
  return cfg;
}

}  // namespace

TEST(Workload, GenerationIsDeterministic) {
  const auto cfg = small_cfg();
  const Workload a = generate_synthetic(cfg);
  const Workload b = generate_synthetic(cfg);
  EXPECT_EQ(a.h.values(), b.h.values());
  EXPECT_EQ(a.w.values(), b.w.values());
  auto other = cfg;
  other.seed = 8;
  EXPECT_NE(generate_synthetic(other).w.values(), a.w.values());
}

TEST(Workload, PatternsProduceExpectedLogits) {
  auto cfg = small_cfg();
  cfg.pattern = LogitPattern::OneDominant;
  cfg.precision = Precision::Fp32;
  const Workload work = generate_synthetic(cfg);
  const auto logits = naive_logits(work.h, work.w);
  EXPECT_EQ(logits(0, 0), 5.0);
  EXPECT_EQ(logits(2, 1), 0.0);
  const auto ramp = pattern_logits(LogitPattern::Ramp, 5);
  EXPECT_EQ(ramp, (std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0}));
  EXPECT_EQ(pattern_logits(LogitPattern::Ramp, 1), std::vector<double>{0.0});
}

TEST(Workload, EnumNamesRoundTrip) {
  for (auto p : {LogitPattern::Uniform, LogitPattern::Gaussian, LogitPattern::Ramp, LogitPattern::OneDominant}) {
    EXPECT_EQ(parse_logit_pattern(to_string(p)), p);
  }
  for (auto k : {SamplerKind::Baseline, SamplerKind::Streaming, SamplerKind::Fused, SamplerKind::GroupedParallel,
                 SamplerKind::GroupedOnline, SamplerKind::Distributed}) {
    EXPECT_EQ(parse_sampler_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_reduce_mode("tree"), ReduceMode::Tree);
  EXPECT_EQ(parse_exchange_mode("naive"), ExchangeMode::NaiveLogits);
  EXPECT_THROW(parse_sampler_kind("magic"), ContractError);
}

TEST(Workload, Presets) {
  WorkloadConfig cfg;
  apply_preset(cfg, "qwen3-small");
  EXPECT_EQ(cfg.vocab, 151936u);
  EXPECT_EQ(cfg.dim, 4096u);
  apply_preset(cfg, "large");
  EXPECT_EQ(cfg.vocab, 131072u);
  EXPECT_EQ(cfg.dim, 8192u);
  EXPECT_THROW(apply_preset(cfg, "tiny"), ContractError);
}

TEST(Workload, JsonConfig) {
  WorkloadConfig cfg;
  apply_json_config(cfg, nlohmann::json::parse(R"({"preset":"qwen3-small","D":64,"sampler":"grouped-online",
                                                   "banned":[1,2],"vocab_tile":128,"reduce":"tree"})"));
  EXPECT_EQ(cfg.vocab, 151936u);
  EXPECT_EQ(cfg.dim, 64u);
  EXPECT_EQ(cfg.sampler, SamplerKind::GroupedOnline);
  EXPECT_EQ(cfg.banned, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(cfg.tiling.vocab_tile, 128u);
  EXPECT_EQ(cfg.reduce, ReduceMode::Tree);
  EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse(R"({"vocab":10})")), ContractError);
  EXPECT_THROW(apply_json_config(cfg, nlohmann::json::parse("[1]")), ContractError);

  WorkloadConfig round;
  apply_json_config(round, to_json(cfg));
  EXPECT_EQ(to_json(round), to_json(cfg));
}

TEST(Workload, Validation) {
  auto cfg = small_cfg();
  cfg.banned = {200};
  EXPECT_THROW(cfg.validate(), ContractError);
  cfg = small_cfg();
  cfg.group_size = 0;
  EXPECT_THROW(cfg.validate(), ContractError);
  cfg = small_cfg();
  cfg.batch = 0;
  EXPECT_THROW(generate_synthetic(cfg), ContractError);
  cfg = small_cfg();
  const Workload work = generate_synthetic(cfg);
  cfg.vocab = 201;
  EXPECT_THROW(run_sampler(cfg, work, RngKey{0}), ShapeError);
}

TEST(Workload, ExactSamplersAgreePathwise) {
  // streaming, fused and single-rank distributed share the per-token Gumbel stream
  auto cfg = small_cfg();
  cfg.temperature = 0.7;
  cfg.bias_scale = 0.3;
  cfg.banned = {0, 5, 9};
  const Workload work = generate_synthetic(cfg);
  cfg.sampler = SamplerKind::Streaming;
  const auto streaming = run_sampler(cfg, work, RngKey{4});
  cfg.sampler = SamplerKind::Fused;
  const auto fused = run_sampler(cfg, work, RngKey{4});
  cfg.sampler = SamplerKind::Distributed;
  cfg.world_size = 1;
  const auto dist = run_sampler(cfg, work, RngKey{4});
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    EXPECT_EQ(streaming.samples[b].index, fused.samples[b].index);
    EXPECT_EQ(dist.samples[b].index, fused.samples[b].index);
    EXPECT_NE(fused.samples[b].index, 5u);
  }
  EXPECT_TRUE(dist.transport.has_value());
}

TEST(Workload, EverySamplerRuns) {
  auto cfg = small_cfg();
  const Workload work = generate_synthetic(cfg);
  for (auto k : {SamplerKind::Baseline, SamplerKind::Streaming, SamplerKind::Fused, SamplerKind::GroupedParallel,
                 SamplerKind::GroupedOnline, SamplerKind::Distributed}) {
    cfg.sampler = k;
    const auto run = run_sampler(cfg, work, RngKey{1});
    ASSERT_EQ(run.samples.size(), cfg.batch) << to_string(k);
    for (const auto& s : run.samples) EXPECT_LT(s.index, cfg.vocab);
    EXPECT_GT(run.ledger.total_bytes(), 0u);
  }
}

TEST(Bench, QuantileInterpolates) {
  EXPECT_EQ(quantile_of({3.0, 1.0, 2.0}, 0.5), 2.0);
  EXPECT_EQ(quantile_of({1.0, 2.0}, 0.5), 1.5);
  EXPECT_NEAR(quantile_of({0.0, 10.0}, 0.1), 1.0, 1e-15);
  EXPECT_EQ(quantile_of({4.0}, 0.9), 4.0);
  EXPECT_THROW(quantile_of({}, 0.5), ContractError);
  EXPECT_THROW(quantile_of({1.0}, 1.5), ContractError);
}

TEST(Bench, DefaultsAndLedgerTotals) {
  EXPECT_EQ(kDefaultWarmup, 25u);
  EXPECT_EQ(kDefaultIterations, 100u);
  auto cfg = small_cfg();
  const Workload work = generate_synthetic(cfg);
  cfg.sampler = SamplerKind::Fused;
  const auto fused = bench_run(cfg, work, RngKey{0}, 4, 1);
  EXPECT_EQ(fused.iterations, 4u);
  EXPECT_EQ(fused.warmup, 1u);
  EXPECT_LE(fused.p10_seconds, fused.median_seconds);
  EXPECT_LE(fused.median_seconds, fused.p90_seconds);
  EXPECT_EQ(fused.ledger_total.total_bytes(), 4 * fused.ledger_per_iteration.total_bytes());
  EXPECT_EQ(fused.ledger_per_iteration.materialized_bytes(), 0u);

  cfg.sampler = SamplerKind::Baseline;
  const auto base = bench_run(cfg, work, RngKey{0}, 2, 0);
  const std::uint64_t bv = cfg.batch * cfg.vocab * bytes_per_element(cfg.precision);
  // fused re-reads W once per batch tile, so only the [B, V] traffic is compared
  EXPECT_GE(base.ledger_per_iteration.materialized_bytes() - fused.ledger_per_iteration.materialized_bytes(), 4 * bv);
  EXPECT_THROW(bench_run(cfg, work, RngKey{0}, 0, 0), ContractError);

  nlohmann::json j = base;
  EXPECT_EQ(j.at("sampler"), "baseline");
  EXPECT_TRUE(j.contains("ledger_per_iteration"));
}
