#include "flashsample/cost_model.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "flashsample/errors.hpp"
#include "json.hpp"

namespace flashsample::cost {

void CostInputs::validate() const {
  if (batch == 0 || vocab == 0 || dim == 0 || bytes_per_element == 0) {
    throw ContractError("cost inputs B, V, D and bytes/element must all be positive");
  }
}

std::vector<GpuSpec> default_gpu_specs() {
  return {{"H100", 3.35, 989.0}, {"H200", 4.8, 989.0}, {"B200", 8.0, 2250.0}, {"B300", 8.0, 2250.0}};
}

std::filesystem::path default_gpu_spec_path() { return std::filesystem::path(FLASHSAMPLE_DATA_DIR) / "gpu_specs.json"; }

std::vector<GpuSpec> load_gpu_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open GPU spec file " + path.string());
  const auto doc = nlohmann::json::parse(in);
  std::vector<GpuSpec> specs;
  for (const auto& entry : doc) {
    GpuSpec g{entry.at("name").get<std::string>(), entry.at("hbm_bandwidth_tbps").get<double>(),
              entry.at("peak_tflops").get<double>()};
    if (!(g.hbm_bandwidth_tbps > 0.0) || !(g.peak_tflops > 0.0)) {
      throw ContractError("GPU spec '" + g.name + "' needs positive bandwidth and peak compute");
    }
    specs.push_back(std::move(g));
  }
  return specs;
}

double intensity_materialized(const CostInputs& c, double logits_passes) {
  c.validate();
  if (!(logits_passes >= 1.0)) throw ContractError("logits pass multiplier must be >= 1");
  const double b = static_cast<double>(c.batch), v = static_cast<double>(c.vocab), d = static_cast<double>(c.dim);
  return b * v * d / (v * d + b * d + 2.0 * b * v * logits_passes);
}

double intensity_fused(const CostInputs& c) {
  c.validate();
  const double b = static_cast<double>(c.batch), v = static_cast<double>(c.vocab);
  return b * v / (v + b);
}

double extra_traffic_fraction(std::uint64_t batch, std::uint64_t dim) {
  if (batch == 0 || dim == 0) throw ContractError("B and D must be positive");
  return 2.0 * static_cast<double>(batch) / static_cast<double>(dim);
}

RoundTrip logits_roundtrip(std::uint64_t batch, std::uint64_t vocab, double bandwidth_bytes_per_s,
                           std::uint64_t bytes_per_element) {
  if (batch == 0 || vocab == 0 || bytes_per_element == 0) throw ContractError("B, V and bytes/element must be positive");
  if (!(bandwidth_bytes_per_s > 0.0)) throw ContractError("bandwidth must be positive");
  RoundTrip r;
  r.bytes = 2 * bytes_per_element * batch * vocab;
  r.seconds = static_cast<double>(r.bytes) / bandwidth_bytes_per_s;
  return r;
}

double roofline_point(const GpuSpec& gpu, double intensity) {
  if (!(intensity > 0.0)) throw ContractError("arithmetic intensity must be positive");
  return std::min(gpu.peak_tflops, gpu.hbm_bandwidth_tbps * intensity);
}

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", fraction * 100.0);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

std::vector<CostRow> cost_table(std::uint64_t vocab, std::uint64_t dim, const std::vector<std::uint64_t>& batches,
                                const std::vector<GpuSpec>& gpus, double roundtrip_bandwidth_bytes_per_s,
                                std::uint64_t bytes_per_element, double logits_passes) {
  std::vector<CostRow> rows;
  for (std::uint64_t b : batches) {
    const CostInputs c{b, vocab, dim, bytes_per_element};
    CostRow r;
    r.batch = b;
    r.intensity_materialized = intensity_materialized(c, logits_passes);
    r.intensity_fused = intensity_fused(c);
    r.extra_fraction = extra_traffic_fraction(b, dim);
    r.roundtrip = logits_roundtrip(b, vocab, roundtrip_bandwidth_bytes_per_s, bytes_per_element);
    for (const GpuSpec& g : gpus) {
      r.attainable_materialized.push_back(roofline_point(g, r.intensity_materialized));
      r.attainable_fused.push_back(roofline_point(g, r.intensity_fused));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace flashsample::cost
