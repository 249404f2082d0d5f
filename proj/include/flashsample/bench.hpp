#pragma once

// CPU timing harness. Wall time from a monotonic clock; byte counts from the
// samplers' traffic ledgers.

#include <cstddef>
#include <optional>
#include <vector>

#include "flashsample/workload.hpp"
#include "json.hpp"

namespace flashsample {

inline constexpr std::size_t kDefaultWarmup = 25;
inline constexpr std::size_t kDefaultIterations = 100;

struct BenchReport {
  SamplerKind sampler = SamplerKind::Fused;
  std::size_t warmup = kDefaultWarmup;
  std::size_t iterations = kDefaultIterations;
  double median_seconds = 0.0;
  double p10_seconds = 0.0;
  double p90_seconds = 0.0;
  double samples_per_second = 0.0;  // B / median
  TrafficLedger ledger_per_iteration;
  TrafficLedger ledger_total;  // timed iterations only
  std::optional<TransportStats> transport_per_iteration;
};

void to_json(nlohmann::json& j, const TrafficLedger& l);
void to_json(nlohmann::json& j, const BenchReport& r);

// Linear interpolation between order statistics; q in [0, 1].
double quantile_of(std::vector<double> values, double q);

BenchReport bench_run(const WorkloadConfig& cfg, const Workload& work, RngKey key,
                      std::size_t iterations = kDefaultIterations, std::size_t warmup = kDefaultWarmup);

}  // namespace flashsample
