#include "flashsample/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "flashsample/errors.hpp"

namespace flashsample {

void to_json(nlohmann::json& j, const TrafficLedger& l) {
  j = nlohmann::json{{"w_read_bytes", l.w_read_bytes},
                     {"h_read_bytes", l.h_read_bytes},
                     {"candidate_write_bytes", l.candidate_write_bytes},
                     {"candidate_read_bytes", l.candidate_read_bytes},
                     {"logits_write_bytes", l.logits_write_bytes},
                     {"logits_read_bytes", l.logits_read_bytes},
                     {"total_bytes", l.total_bytes()}};
}

void to_json(nlohmann::json& j, const BenchReport& r) {
  j = nlohmann::json{{"sampler", to_string(r.sampler)},
                     {"warmup", r.warmup},
                     {"iterations", r.iterations},
                     {"median_seconds", r.median_seconds},
                     {"p10_seconds", r.p10_seconds},
                     {"p90_seconds", r.p90_seconds},
                     {"samples_per_second", r.samples_per_second},
                     {"ledger_per_iteration", r.ledger_per_iteration},
                     {"ledger_total", r.ledger_total}};
  if (r.transport_per_iteration) {
    j["transport_per_iteration"] = {{"messages", r.transport_per_iteration->messages_sent},
                                    {"bytes", r.transport_per_iteration->total_bytes}};
  }
}

double quantile_of(std::vector<double> values, double q) {
  if (values.empty()) throw ContractError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ContractError("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BenchReport bench_run(const WorkloadConfig& cfg, const Workload& work, RngKey key, std::size_t iterations,
                      std::size_t warmup) {
  if (iterations == 0) throw ContractError("bench needs at least one timed iteration");
  BenchReport report;
  report.sampler = cfg.sampler;
  report.warmup = warmup;
  report.iterations = iterations;

  for (std::size_t i = 0; i < warmup; ++i) (void)run_sampler(cfg, work, key);

  using clock = std::chrono::steady_clock;
  std::vector<double> seconds;
  seconds.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto start = clock::now();
    SamplerRun run = run_sampler(cfg, work, key);
    const auto stop = clock::now();
    seconds.push_back(std::chrono::duration<double>(stop - start).count());
    report.ledger_total += run.ledger;
    if (i == 0) {
      report.ledger_per_iteration = run.ledger;
      report.transport_per_iteration = run.transport;
    }
  }
  report.median_seconds = quantile_of(seconds, 0.5);
  report.p10_seconds = quantile_of(seconds, 0.1);
  report.p90_seconds = quantile_of(seconds, 0.9);
  report.samples_per_second =
      report.median_seconds > 0.0 ? static_cast<double>(cfg.batch) / report.median_seconds : 0.0;
  return report;
}

}  // namespace flashsample
