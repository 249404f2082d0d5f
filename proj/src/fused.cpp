#include "flashsample/fused.hpp"

#include <algorithm>
#include <string>

#include "flashsample/detail/parallel.hpp"
#include "flashsample/errors.hpp"

namespace flashsample {

void TilingConfig::validate() const {
  if (vocab_tile == 0 || batch_tile == 0 || k_tile == 0) {
    throw ContractError("tile sizes must be >= 1 (vocab_tile=" + std::to_string(vocab_tile) +
                        ", batch_tile=" + std::to_string(batch_tile) + ", k_tile=" + std::to_string(k_tile) + ")");
  }
}

TrafficLedger& TrafficLedger::operator+=(const TrafficLedger& other) noexcept {
  w_read_bytes += other.w_read_bytes;
  h_read_bytes += other.h_read_bytes;
  candidate_write_bytes += other.candidate_write_bytes;
  candidate_read_bytes += other.candidate_read_bytes;
  logits_write_bytes += other.logits_write_bytes;
  logits_read_bytes += other.logits_read_bytes;
  return *this;
}

std::size_t tile_count(std::size_t extent, std::size_t tile) noexcept { return (extent + tile - 1) / tile; }

namespace {

std::size_t candidate_bytes(bool with_log_normalizer) {
  return kCandidateBytes + (with_log_normalizer ? kCandidateLogMassBytes : 0);
}

void check_shapes(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t, const FusedOptions& opts) {
  if (h.dim() != w.dim()) {
    throw ShapeError("hidden dim " + std::to_string(h.dim()) + " vs weight dim " + std::to_string(w.dim()));
  }
  const std::size_t vocab_end = opts.vocab_offset + w.vocab();
  if (!t.bias().empty() && t.bias().size() < vocab_end) {
    throw ContractError("bias shorter than the vocabulary range being sampled");
  }
}

}  // namespace

void blocked_matmul_tile(const HiddenStates& h, const LmHeadWeights& w, IndexRange rows, IndexRange vocab,
                         std::size_t k_tile, Matrix<double>& acc, TrafficLedger* ledger) {
  if (h.dim() != w.dim()) throw ShapeError("inner dimensions differ");
  if (rows.end > h.batch() || vocab.end > w.vocab() || rows.begin > rows.end || vocab.begin > vocab.end) {
    throw ShapeError("tile range outside the operand");
  }
  if (k_tile == 0) throw ContractError("k_tile must be >= 1");
  if (acc.rows() != rows.size() || acc.cols() != vocab.size()) acc = Matrix<double>(rows.size(), vocab.size());
  std::fill(acc.data().begin(), acc.data().end(), 0.0);

  const std::size_t dim = h.dim();
  const std::size_t element_bytes = w.element_bytes();
  for (std::size_t d0 = 0; d0 < dim; d0 += k_tile) {
    const std::size_t d1 = std::min(dim, d0 + k_tile);
    if (ledger != nullptr) {
      ledger->h_read_bytes += rows.size() * (d1 - d0) * element_bytes;
      ledger->w_read_bytes += vocab.size() * (d1 - d0) * element_bytes;
    }
    for (std::size_t b = 0; b < rows.size(); ++b) {
      const float* hb = h.row(rows.begin + b).data();
      for (std::size_t i = 0; i < vocab.size(); ++i) {
        const float* wi = w.row(vocab.begin + i).data();
        double sum = acc(b, i);
        for (std::size_t d = d0; d < d1; ++d) sum += static_cast<double>(hb[d]) * static_cast<double>(wi[d]);
        acc(b, i) = sum;
      }
    }
  }
}

Stage1Output stage1_tile_candidates(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t,
                                    RngKey key, const TilingConfig& cfg, const FusedOptions& opts) {
  cfg.validate();
  check_shapes(h, w, t, opts);

  const std::size_t batch = h.batch();
  const std::size_t vocab = w.vocab();
  const std::size_t batch_tiles = tile_count(batch, cfg.batch_tile);
  const std::size_t vocab_tiles = tile_count(vocab, cfg.vocab_tile);
  const std::size_t cand_bytes = candidate_bytes(opts.with_log_normalizer);

  Stage1Output out{CandidateBuffer(batch, vocab_tiles), {}};
  std::vector<TrafficLedger> task_ledgers(batch_tiles * vocab_tiles);

  detail::parallel_for(batch_tiles * vocab_tiles, opts.threads, [&](std::size_t task) {
    const std::size_t bt = task / vocab_tiles;
    const std::size_t vt = task % vocab_tiles;
    const IndexRange rows{bt * cfg.batch_tile, std::min(batch, (bt + 1) * cfg.batch_tile)};
    const IndexRange cols{vt * cfg.vocab_tile, std::min(vocab, (vt + 1) * cfg.vocab_tile)};
    TrafficLedger& ledger = task_ledgers[task];

    Matrix<double> acc(rows.size(), cols.size());
    blocked_matmul_tile(h, w, rows, cols, cfg.k_tile, acc, &ledger);

    for (std::size_t b = 0; b < rows.size(); ++b) {
      const std::size_t local_row = rows.begin + b;
      const auto stream_row = static_cast<std::uint32_t>(opts.row_offset + local_row);
      TileCandidate cand;
      cand.row = static_cast<std::uint32_t>(local_row);
      cand.tile = vt;
      cand.index = opts.vocab_offset + cols.begin;
      OnlineLogSumExp lse;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::size_t global = opts.vocab_offset + cols.begin + i;
        const double logit = t.apply(acc(b, i), global);
        if (logit == kNegInf) continue;
        if (opts.with_log_normalizer) lse.add(logit);
        const double score = logit + token_gumbel(key, stream_row, global, opts.gumbel_mode);
        if (score > cand.score) {
          cand.score = score;
          cand.index = global;
        }
      }
      if (opts.with_log_normalizer) cand.log_mass = lse.value();
      out.candidates.at(local_row, vt) = cand;
      ledger.candidate_write_bytes += cand_bytes;
    }
  });

  for (const auto& l : task_ledgers) out.ledger += l;
  return out;
}

std::optional<SampleResult> reduce_candidates(std::span<const TileCandidate> row, bool with_log_normalizer) {
  const TileCandidate* best = nullptr;
  OnlineLogSumExp lse;
  for (const TileCandidate& c : row) {
    if (with_log_normalizer) lse.add(c.log_mass);
    if (c.score == kNegInf) continue;
    if (best == nullptr || c.score > best->score) best = &c;
  }
  if (best == nullptr) return std::nullopt;
  SampleResult result{best->index, std::nullopt};
  if (with_log_normalizer) result.log_normalizer = lse.value();
  return result;
}

std::vector<SampleResult> stage2_reduce(const CandidateBuffer& candidates, bool with_log_normalizer,
                                        TrafficLedger* ledger) {
  std::vector<SampleResult> out;
  out.reserve(candidates.rows());
  for (std::size_t b = 0; b < candidates.rows(); ++b) {
    auto result = reduce_candidates(candidates.row(b), with_log_normalizer);
    if (!result) throw UndefinedDistributionError("row " + std::to_string(b) + " has no finite transformed logit");
    out.push_back(*result);
  }
  if (ledger != nullptr) {
    ledger->candidate_read_bytes +=
        candidates.rows() * candidates.tiles() * candidate_bytes(with_log_normalizer);
  }
  return out;
}

FusedOutput fused_matmul_sample(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t, RngKey key,
                                const TilingConfig& cfg, const FusedOptions& opts) {
  Stage1Output stage1 = stage1_tile_candidates(h, w, t, key, cfg, opts);
  FusedOutput out;
  out.ledger = stage1.ledger;
  out.samples = stage2_reduce(stage1.candidates, opts.with_log_normalizer, &out.ledger);
  return out;
}

std::vector<std::optional<SampleResult>> fused_matmul_sample_partial(const HiddenStates& h, const LmHeadWeights& w,
                                                                     const TransformSpec& t, RngKey key,
                                                                     const TilingConfig& cfg, const FusedOptions& opts,
                                                                     TrafficLedger* ledger) {
  Stage1Output stage1 = stage1_tile_candidates(h, w, t, key, cfg, opts);
  std::vector<std::optional<SampleResult>> out;
  out.reserve(h.batch());
  for (std::size_t b = 0; b < h.batch(); ++b) {
    out.push_back(reduce_candidates(stage1.candidates.row(b), opts.with_log_normalizer));
  }
  if (ledger != nullptr) {
    *ledger += stage1.ledger;
    ledger->candidate_read_bytes +=
        stage1.candidates.rows() * stage1.candidates.tiles() * candidate_bytes(opts.with_log_normalizer);
  }
  return out;
}

TrafficLedger expected_fused_traffic(std::size_t batch, std::size_t vocab, std::size_t dim,
                                     std::size_t element_bytes, const TilingConfig& cfg, bool with_log_normalizer) {
  const std::uint64_t batch_tiles = tile_count(batch, cfg.batch_tile);
  const std::uint64_t vocab_tiles = tile_count(vocab, cfg.vocab_tile);
  const std::uint64_t cand = batch * vocab_tiles * candidate_bytes(with_log_normalizer);
  TrafficLedger l;
  l.w_read_bytes = batch_tiles * vocab * dim * element_bytes;
  l.h_read_bytes = vocab_tiles * batch * dim * element_bytes;
  l.candidate_write_bytes = cand;
  l.candidate_read_bytes = cand;
  return l;
}

FusedOutput baseline_matmul_sample(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t,
                                   RngKey key) {
  t.validate(w.vocab());
  const Matrix<double> logits = naive_logits(h, w);
  const std::uint64_t eb = w.element_bytes();
  const std::uint64_t bv_bytes = static_cast<std::uint64_t>(h.batch()) * w.vocab() * eb;

  FusedOutput out;
  out.ledger.w_read_bytes = static_cast<std::uint64_t>(w.vocab()) * w.dim() * eb;
  out.ledger.h_read_bytes = static_cast<std::uint64_t>(h.batch()) * h.dim() * eb;
  // GEMM epilogue writes logits; transform reads and rewrites them; max, sum
  // and normalize passes read; probabilities and prefix sums are written and
  // read back; the search reads the prefix sums.
  out.ledger.logits_write_bytes = 4 * bv_bytes;
  out.ledger.logits_read_bytes = 6 * bv_bytes;

  out.samples.reserve(h.batch());
  for (std::size_t b = 0; b < h.batch(); ++b) {
    out.samples.push_back(materialized_sample(logits.row(b), t, key, static_cast<std::uint32_t>(b)));
  }
  return out;
}

}  // namespace flashsample
