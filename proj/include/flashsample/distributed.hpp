#pragma once

// Tensor-parallel vocabulary sharding, simulated in-process.
//
// Each rank owns a contiguous slice of W's rows, runs the fused sampler on it
// with global stream positions and sends one fixed-size summary per row
// (log-mass, local sample) over a byte-counting transport. The coordinator
// draws the winning rank with Gumbel-Max over the log-masses.

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flashsample/fused.hpp"
#include "flashsample/reference.hpp"
#include "flashsample/rng.hpp"
#include "flashsample/tensor.hpp"

namespace flashsample {

struct ShardSpec {
  std::size_t world_size = 1;
  std::size_t rank = 0;
  IndexRange vocab_range;
};

// Rank k covers [k * floor(V/n), (k+1) * floor(V/n)); the last rank also takes
// the remainder. Ranks may be empty when V < n.
ShardSpec make_shard(std::size_t vocab, std::size_t world_size, std::size_t rank);
std::vector<ShardSpec> partition_vocab(std::size_t vocab, std::size_t world_size);

// Wire layout: 8-byte log-mass, 4-byte local index, 4-byte flags.
inline constexpr std::size_t kSummaryPayloadBytes = 16;
using SummaryPayload = std::array<std::byte, kSummaryPayloadBytes>;

struct SummaryMessage {
  std::uint32_t rank = 0;
  std::uint32_t row = 0;
  double log_mass = kNegInf;
  std::optional<std::uint32_t> local_sample;  // rank-local index
  std::size_t payload_bytes = kSummaryPayloadBytes;

  SummaryPayload encode() const;
  static SummaryMessage decode(std::uint32_t rank, std::uint32_t row, std::span<const std::byte> payload);
};

struct TransportStats {
  std::uint64_t messages_sent = 0;
  std::uint64_t total_bytes = 0;
  std::vector<std::uint64_t> per_rank_bytes;
};

struct TraceRecord {
  std::uint32_t rank = 0;
  std::uint32_t row = 0;
  std::uint64_t bytes = 0;
  std::string tag;
};

struct Envelope {
  std::uint32_t rank = 0;
  std::uint32_t row = 0;
  std::string tag;
  std::vector<std::byte> payload;
};

// Thread-safe in-process channel from ranks to the coordinator. Every byte
// that crosses it is counted.
class Transport {
 public:
  explicit Transport(std::size_t world_size);

  void send(Envelope envelope);
  // Drains everything sent so far, ordered by (row, rank).
  std::vector<Envelope> drain();

  TransportStats stats() const;
  // One JSON object per line: {"rank":..,"row":..,"bytes":..,"tag":..}, ordered
  // by (tag, row, rank).
  void write_trace_jsonl(std::ostream& os) const;

 private:
  mutable std::mutex mutex_;
  std::deque<Envelope> queue_;
  TransportStats stats_;
  std::vector<TraceRecord> trace_;
};

// Summaries for every row of h on one shard, rows numbered from row_offset.
std::vector<SummaryMessage> rank_local_summaries(const ShardSpec& shard, const LmHeadWeights& w_shard,
                                                 const HiddenStates& h, const TransformSpec& t, RngKey key,
                                                 const TilingConfig& cfg, std::uint32_t row_offset = 0,
                                                 TrafficLedger* ledger = nullptr);

// Summary for one hidden vector x on one shard. w_shard holds exactly the
// shard's rows. Stream positions are global (shard begin + local index).
SummaryMessage rank_local_summary(const ShardSpec& shard, const LmHeadWeights& w_shard, std::span<const float> x,
                                  const TransformSpec& t, RngKey key, std::uint32_t row,
                                  const TilingConfig& cfg = {});

// Gumbel-Max over finite log-masses (OuterGroup stream at (row, rank)), then
// z = rank * shard_stride + local sample. Fills log_normalizer.
SampleResult coordinator_select(std::span<const SummaryMessage> messages, RngKey key, std::uint32_t row,
                                std::size_t shard_stride);

// Same winner as coordinator_select, reached by pairwise reduction over ranks.
SampleResult tree_select(std::span<const SummaryMessage> messages, RngKey key, std::uint32_t row,
                         std::size_t shard_stride);

enum class ReduceMode { Gather, Tree };
enum class ExchangeMode {
  Summaries,    // O(1) bytes per rank per row
  NaiveLogits,  // every rank ships its full local logits, coordinator samples
};

struct DistributedOptions {
  TilingConfig tiling{};
  ReduceMode reduce = ReduceMode::Gather;
  ExchangeMode exchange = ExchangeMode::Summaries;
  unsigned threads = 1;
};

struct DistributedOutput {
  std::vector<SampleResult> samples;
  TransportStats transport;
  TrafficLedger ledger;  // summed over ranks
};

DistributedOutput run_distributed_sample(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t,
                                         RngKey key, std::size_t world_size, const DistributedOptions& opts = {},
                                         Transport* transport = nullptr);

}  // namespace flashsample
