#pragma once

// Two-stage fused matmul + sample.
//
// Stage 1 walks (batch tile x vocabulary tile) blocks. Each block accumulates
// its slice of H W^T in a local buffer, applies the transform, adds per-token
// Gumbel noise and keeps one (score, index) candidate per row. Stage 2 reduces
// the candidates of a row. The full [B, V] logits matrix never exists.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flashsample/reference.hpp"
#include "flashsample/rng.hpp"
#include "flashsample/tensor.hpp"

namespace flashsample {

struct TilingConfig {
  std::size_t vocab_tile = 4096;
  std::size_t batch_tile = 8;
  std::size_t k_tile = 64;

  void validate() const;
  friend bool operator==(const TilingConfig&, const TilingConfig&) = default;
};

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

// Byte counters per logical memory class. Weight, hidden-state and logits
// bytes are counted at the weights' element size; accumulators are on-chip
// and not counted.
struct TrafficLedger {
  std::uint64_t w_read_bytes = 0;
  std::uint64_t h_read_bytes = 0;
  std::uint64_t candidate_write_bytes = 0;
  std::uint64_t candidate_read_bytes = 0;
  std::uint64_t logits_write_bytes = 0;  // any [B, V]-shaped buffer
  std::uint64_t logits_read_bytes = 0;

  std::uint64_t materialized_bytes() const noexcept { return logits_write_bytes + logits_read_bytes; }
  std::uint64_t total_bytes() const noexcept {
    return w_read_bytes + h_read_bytes + candidate_write_bytes + candidate_read_bytes + materialized_bytes();
  }

  TrafficLedger& operator+=(const TrafficLedger& other) noexcept;
  friend bool operator==(const TrafficLedger&, const TrafficLedger&) = default;
};

// 8-byte score + 4-byte index; with a tile log-mass another 8 bytes.
inline constexpr std::size_t kCandidateBytes = 12;
inline constexpr std::size_t kCandidateLogMassBytes = 8;

struct TileCandidate {
  std::uint32_t row = 0;  // local batch row
  std::size_t tile = 0;
  double score = kNegInf;  // -inf when the tile has no finite logit
  std::size_t index = 0;   // global vocabulary index
  double log_mass = kNegInf;
};

class CandidateBuffer {
 public:
  CandidateBuffer() = default;
  CandidateBuffer(std::size_t rows, std::size_t tiles) : rows_(rows), tiles_(tiles), data_(rows * tiles) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t tiles() const noexcept { return tiles_; }
  TileCandidate& at(std::size_t row, std::size_t tile) { return data_[row * tiles_ + tile]; }
  const TileCandidate& at(std::size_t row, std::size_t tile) const { return data_[row * tiles_ + tile]; }
  std::span<const TileCandidate> row(std::size_t r) const { return {data_.data() + r * tiles_, tiles_}; }
  std::span<TileCandidate> row(std::size_t r) { return {data_.data() + r * tiles_, tiles_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t tiles_ = 0;
  std::vector<TileCandidate> data_;
};

struct FusedOptions {
  // Global position of W's first row and H's first row in the RNG stream and
  // in the transform's bias/mask. Non-zero when running on a shard.
  std::size_t vocab_offset = 0;
  std::uint32_t row_offset = 0;
  bool with_log_normalizer = false;
  GumbelMode gumbel_mode = GumbelMode::Exact64;
  unsigned threads = 1;
};

struct Stage1Output {
  CandidateBuffer candidates;
  TrafficLedger ledger;
};

struct FusedOutput {
  std::vector<SampleResult> samples;
  TrafficLedger ledger;
};

// acc (|rows| x |vocab|) = H[rows, :] W[vocab, :]^T, loading k_tile columns at
// a time and accumulating each element in double in order of d. Load traffic
// is added to ledger when given.
void blocked_matmul_tile(const HiddenStates& h, const LmHeadWeights& w, IndexRange rows, IndexRange vocab,
                         std::size_t k_tile, Matrix<double>& acc, TrafficLedger* ledger = nullptr);

std::size_t tile_count(std::size_t extent, std::size_t tile) noexcept;

Stage1Output stage1_tile_candidates(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t,
                                    RngKey key, const TilingConfig& cfg, const FusedOptions& opts = {});

// Best candidate of one row, or nullopt if every candidate is -inf. Ties go
// to the smaller tile ordinal, then the smaller index.
std::optional<SampleResult> reduce_candidates(std::span<const TileCandidate> row, bool with_log_normalizer);

// Throws UndefinedDistributionError for a row whose candidates are all -inf.
std::vector<SampleResult> stage2_reduce(const CandidateBuffer& candidates, bool with_log_normalizer = false,
                                        TrafficLedger* ledger = nullptr);

FusedOutput fused_matmul_sample(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t, RngKey key,
                                const TilingConfig& cfg = {}, const FusedOptions& opts = {});

// Stage 1 + a row-wise reduction that reports zero-mass rows as nullopt
// instead of throwing.
std::vector<std::optional<SampleResult>> fused_matmul_sample_partial(const HiddenStates& h, const LmHeadWeights& w,
                                                                     const TransformSpec& t, RngKey key,
                                                                     const TilingConfig& cfg, const FusedOptions& opts,
                                                                     TrafficLedger* ledger = nullptr);

// Analytic Stage-1/2 traffic for a tiling: W is re-read once per batch tile,
// H once per vocabulary tile.
TrafficLedger expected_fused_traffic(std::size_t batch, std::size_t vocab, std::size_t dim,
                                     std::size_t element_bytes, const TilingConfig& cfg, bool with_log_normalizer);

// Materialized comparison path: GEMM writes [B, V] logits, then softmax and
// prefix-sum sampling read and write them again. Ledger counts every pass.
FusedOutput baseline_matmul_sample(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t,
                                   RngKey key);

}  // namespace flashsample
