#pragma once

// Analytic traffic and roofline model for the LM-head + sampling step.
// Units: bytes, FLOPs, seconds. TB/s and TFLOP/s are decimal (1e12).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace flashsample::cost {

struct CostInputs {
  std::uint64_t batch = 1;
  std::uint64_t vocab = 151936;
  std::uint64_t dim = 4096;
  std::uint64_t bytes_per_element = 2;

  void validate() const;
};

struct GpuSpec {
  std::string name;
  double hbm_bandwidth_tbps = 0.0;  // TB/s
  double peak_tflops = 0.0;         // dense BF16 TFLOP/s
  double ops_byte_ratio() const noexcept { return peak_tflops / hbm_bandwidth_tbps; }
};

// H100, H200, B200, B300 as used for the kernel benchmarks.
std::vector<GpuSpec> default_gpu_specs();

// JSON array of {"name", "hbm_bandwidth_tbps", "peak_tflops"}.
std::vector<GpuSpec> load_gpu_specs(const std::filesystem::path& path);
std::filesystem::path default_gpu_spec_path();

// BVD / (VD + BD + 2 B V * passes). passes = 1 is the one-write-one-read
// lower bound; real samplers make more passes.
double intensity_materialized(const CostInputs& c, double logits_passes = 1.0);

// BV / (V + B).
double intensity_fused(const CostInputs& c);

// Extra logits traffic relative to the weight read: 4BV / 2VD = 2B/D.
double extra_traffic_fraction(std::uint64_t batch, std::uint64_t dim);

struct RoundTrip {
  std::uint64_t bytes = 0;
  double seconds = 0.0;
};

// One BF16 write plus one read of the [B, V] logits: 4BV bytes.
RoundTrip logits_roundtrip(std::uint64_t batch, std::uint64_t vocab, double bandwidth_bytes_per_s,
                           std::uint64_t bytes_per_element = 2);

// min(peak, bandwidth * intensity), TFLOP/s.
double roofline_point(const GpuSpec& gpu, double intensity);

// Fraction as a percentage rounded to 3 decimals, trailing zeros dropped:
// 2/4096 -> "0.049".
std::string format_percent(double fraction);

struct CostRow {
  std::uint64_t batch = 0;
  double intensity_materialized = 0.0;
  double intensity_fused = 0.0;
  double extra_fraction = 0.0;
  RoundTrip roundtrip;
  std::vector<double> attainable_materialized;  // per GPU, TFLOP/s
  std::vector<double> attainable_fused;
};

std::vector<CostRow> cost_table(std::uint64_t vocab, std::uint64_t dim, const std::vector<std::uint64_t>& batches,
                                const std::vector<GpuSpec>& gpus, double roundtrip_bandwidth_bytes_per_s,
                                std::uint64_t bytes_per_element = 2, double logits_passes = 1.0);

}  // namespace flashsample::cost
