#pragma once

// Verification suites shared by `flashsample verify` and the acceptance test.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "flashsample/reference.hpp"
#include "flashsample/rng.hpp"
#include "flashsample/stat_verify.hpp"
#include "json.hpp"

namespace flashsample::suites {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::vector<std::string> lines;  // human-readable detail
  nlohmann::json details;
};

struct Fixture {
  std::string name;
  LogitsRow logits;  // every finite value is float-representable
  TransformSpec transform;
};

// V in {2, 8, 128} x {uniform, ramp, one-dominant, half-masked} x
// {identity, tau=0.7 + bias + 25% banned}.
std::vector<Fixture> exactness_fixtures();

struct NamedSampler {
  std::string name;
  stats::SamplerFn fn;
};

// baseline, streaming, fused, grouped-parallel, grouped-online and
// distributed with n = 2, 4, 8.
std::vector<NamedSampler> exact_samplers(unsigned threads = 1);

struct ExactnessOptions {
  std::size_t samples = 5000;
  double alpha = stats::kDefaultAlpha;
  RngKey key{0};
  unsigned threads = 1;
};

SuiteResult exactness_suite(const ExactnessOptions& opts = {});

struct PathwiseOptions {
  std::size_t configs = 100;
  std::size_t max_batch = 8;
  std::size_t max_vocab = 4096;
  std::size_t max_dim = 256;
  std::uint64_t seed = 0;
};

// At least 10 tilings per config, always including vocab_tile 1 and V.
std::vector<TilingConfig> tiling_sweep(std::size_t batch, std::size_t vocab, std::size_t dim, std::uint64_t salt);

SuiteResult pathwise_suite(const PathwiseOptions& opts = {});

struct MaxStabilityOptions {
  std::size_t groups = 5;
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
};

SuiteResult max_stability_suite(const MaxStabilityOptions& opts = {});

// Online log-normalizer vs logsumexp of the transformed row, 1e-10 relative.
SuiteResult log_normalizer_suite();

// Fixed regression values of the analytic cost model.
SuiteResult cost_model_suite();

// Transport bytes per row across V and n, and the naive-gather ratio.
SuiteResult communication_suite(std::uint64_t seed = 0);

// [B, V] logits traffic of fused vs baseline.
SuiteResult ledger_suite(std::uint64_t seed = 0);

// Short fused bench run whose weight reads must match the analytic count.
SuiteResult bench_smoke_suite(std::uint64_t seed = 0);

inline constexpr const char* kSuiteNames[] = {"exactness", "pathwise", "maxstability", "lognorm",
                                              "costmodel", "comm",     "ledger",       "benchsmoke"};

SuiteResult run_suite(const std::string& name, std::uint64_t seed, unsigned threads, std::size_t samples,
                      double alpha);

}  // namespace flashsample::suites
