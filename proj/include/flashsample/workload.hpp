#pragma once

// Synthetic workloads and a uniform entry point over every sampler.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flashsample/distributed.hpp"
#include "flashsample/fused.hpp"
#include "flashsample/reference.hpp"
#include "flashsample/rng.hpp"
#include "flashsample/tensor.hpp"
#include "json.hpp"

namespace flashsample {

enum class LogitPattern { Uniform, Gaussian, Ramp, OneDominant };
std::string_view to_string(LogitPattern p);
LogitPattern parse_logit_pattern(std::string_view text);

enum class SamplerKind { Baseline, Streaming, Fused, GroupedParallel, GroupedOnline, Distributed };
std::string_view to_string(SamplerKind k);
SamplerKind parse_sampler_kind(std::string_view text);

std::string_view to_string(ReduceMode m);
ReduceMode parse_reduce_mode(std::string_view text);
std::string_view to_string(ExchangeMode m);
ExchangeMode parse_exchange_mode(std::string_view text);

struct WorkloadConfig {
  std::size_t batch = 4;
  std::size_t vocab = 4096;
  std::size_t dim = 256;
  std::uint64_t seed = 0;
  LogitPattern pattern = LogitPattern::Gaussian;
  Precision precision = Precision::Bf16;

  double temperature = 1.0;
  double bias_scale = 0.0;  // bias_i = bias_scale * sin(i); 0 means no bias
  std::vector<std::size_t> banned;

  SamplerKind sampler = SamplerKind::Fused;
  TilingConfig tiling{};
  std::size_t group_size = 64;
  std::size_t world_size = 4;
  ReduceMode reduce = ReduceMode::Gather;
  ExchangeMode exchange = ExchangeMode::Summaries;
  GumbelMode gumbel_mode = GumbelMode::Exact64;
  unsigned threads = 1;

  void validate() const;
  TransformSpec transform() const;
};

// Named shapes: "qwen3-small" (V=151936, D=4096) and "large" (V=131072, D=8192).
void apply_preset(WorkloadConfig& cfg, std::string_view preset);

// Keys use the flag names (B, V, D, seed, pattern, precision, temperature,
// bias_scale, banned, sampler, vocab_tile, batch_tile, k_tile, group_size,
// world_size, reduce, exchange, gumbel_mode, threads, preset). Unknown keys
// are rejected.
void apply_json_config(WorkloadConfig& cfg, const nlohmann::json& j);
nlohmann::json to_json(const WorkloadConfig& cfg);

struct Workload {
  HiddenStates h;
  LmHeadWeights w;
};

// Deterministic in cfg.seed. Gaussian: H ~ N(0,1), W ~ N(0,1)/sqrt(D). Other
// patterns put the pattern in W[:,0] with H[:,0] = 1 and zero the rest of W,
// so every row's logits equal the pattern exactly.
Workload generate_synthetic(const WorkloadConfig& cfg);

// Pattern values for a single row of length V.
std::vector<double> pattern_logits(LogitPattern p, std::size_t vocab);

struct SamplerRun {
  std::vector<SampleResult> samples;
  TrafficLedger ledger;
  std::optional<TransportStats> transport;
};

// Non-fused samplers other than the baseline are charged one write and one
// read of the [B, V] logits they consume.
SamplerRun run_sampler(const WorkloadConfig& cfg, const Workload& work, RngKey key);

}  // namespace flashsample
