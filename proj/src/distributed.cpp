#include "flashsample/distributed.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <ostream>
#include <tuple>

#include "flashsample/detail/parallel.hpp"
#include "flashsample/errors.hpp"

namespace flashsample {

ShardSpec make_shard(std::size_t vocab, std::size_t world_size, std::size_t rank) {
  if (world_size == 0) throw ContractError("world size must be >= 1");
  if (rank >= world_size) throw ContractError("rank out of range");
  const std::size_t stride = vocab / world_size;
  const std::size_t begin = rank * stride;
  const std::size_t end = rank + 1 == world_size ? vocab : begin + stride;
  return {world_size, rank, {begin, end}};
}

std::vector<ShardSpec> partition_vocab(std::size_t vocab, std::size_t world_size) {
  if (world_size == 0) throw ContractError("world size must be >= 1");
  std::vector<ShardSpec> shards;
  shards.reserve(world_size);
  for (std::size_t k = 0; k < world_size; ++k) shards.push_back(make_shard(vocab, world_size, k));
  return shards;
}

namespace {

constexpr std::uint32_t kHasSample = 1u;

}  // namespace

SummaryPayload SummaryMessage::encode() const {
  SummaryPayload out{};
  const std::uint32_t index = local_sample.value_or(0);
  const std::uint32_t flags = local_sample ? kHasSample : 0u;
  std::memcpy(out.data(), &log_mass, 8);
  std::memcpy(out.data() + 8, &index, 4);
  std::memcpy(out.data() + 12, &flags, 4);
  return out;
}

SummaryMessage SummaryMessage::decode(std::uint32_t rank, std::uint32_t row, std::span<const std::byte> payload) {
  if (payload.size() != kSummaryPayloadBytes) throw ShapeError("summary payload must be 16 bytes");
  SummaryMessage m;
  m.rank = rank;
  m.row = row;
  std::uint32_t index = 0;
  std::uint32_t flags = 0;
  std::memcpy(&m.log_mass, payload.data(), 8);
  std::memcpy(&index, payload.data() + 8, 4);
  std::memcpy(&flags, payload.data() + 12, 4);
  if ((flags & kHasSample) != 0) m.local_sample = index;
  return m;
}

Transport::Transport(std::size_t world_size) { stats_.per_rank_bytes.assign(world_size, 0); }

void Transport::send(Envelope envelope) {
  std::lock_guard lock(mutex_);
  const std::uint64_t bytes = envelope.payload.size();
  if (envelope.rank >= stats_.per_rank_bytes.size()) throw ContractError("message from unknown rank");
  stats_.messages_sent += 1;
  stats_.total_bytes += bytes;
  stats_.per_rank_bytes[envelope.rank] += bytes;
  trace_.push_back({envelope.rank, envelope.row, bytes, envelope.tag});
  queue_.push_back(std::move(envelope));
}

std::vector<Envelope> Transport::drain() {
  std::lock_guard lock(mutex_);
  std::vector<Envelope> out(std::make_move_iterator(queue_.begin()), std::make_move_iterator(queue_.end()));
  queue_.clear();
  std::stable_sort(out.begin(), out.end(),
                   [](const Envelope& a, const Envelope& b) { return std::tie(a.row, a.rank) < std::tie(b.row, b.rank); });
  return out;
}

TransportStats Transport::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

void Transport::write_trace_jsonl(std::ostream& os) const {
  std::vector<TraceRecord> records;
  {
    std::lock_guard lock(mutex_);
    records = trace_;
  }
  std::stable_sort(records.begin(), records.end(), [](const TraceRecord& a, const TraceRecord& b) {
    return std::tie(a.tag, a.row, a.rank) < std::tie(b.tag, b.row, b.rank);
  });
  for (const auto& r : records) {
    os << "{\"rank\":" << r.rank << ",\"row\":" << r.row << ",\"bytes\":" << r.bytes << ",\"tag\":\"" << r.tag
       << "\"}\n";
  }
}

std::vector<SummaryMessage> rank_local_summaries(const ShardSpec& shard, const LmHeadWeights& w_shard,
                                                 const HiddenStates& h, const TransformSpec& t, RngKey key,
                                                 const TilingConfig& cfg, std::uint32_t row_offset,
                                                 TrafficLedger* ledger) {
  if (w_shard.vocab() != shard.vocab_range.size()) throw ShapeError("shard weights do not match the shard range");
  std::vector<SummaryMessage> out(h.batch());
  for (std::size_t b = 0; b < h.batch(); ++b) {
    out[b].rank = static_cast<std::uint32_t>(shard.rank);
    out[b].row = static_cast<std::uint32_t>(row_offset + b);
  }
  if (shard.vocab_range.size() == 0) return out;

  FusedOptions opts;
  opts.vocab_offset = shard.vocab_range.begin;
  opts.row_offset = row_offset;
  opts.with_log_normalizer = true;
  const auto partial = fused_matmul_sample_partial(h, w_shard, t, key, cfg, opts, ledger);
  for (std::size_t b = 0; b < h.batch(); ++b) {
    if (!partial[b]) continue;
    out[b].log_mass = *partial[b]->log_normalizer;
    out[b].local_sample = static_cast<std::uint32_t>(partial[b]->index - shard.vocab_range.begin);
  }
  return out;
}

SummaryMessage rank_local_summary(const ShardSpec& shard, const LmHeadWeights& w_shard, std::span<const float> x,
                                  const TransformSpec& t, RngKey key, std::uint32_t row, const TilingConfig& cfg) {
  const HiddenStates h(Matrix<float>(1, x.size(), std::vector<float>(x.begin(), x.end())));
  return rank_local_summaries(shard, w_shard, h, t, key, cfg, row).front();
}

namespace {

double outer_gumbel(RngKey key, std::uint32_t row, std::uint32_t rank) {
  return gumbel_from_uniform(derive_uniform(key, {row, rank, StreamDomain::OuterGroup}));
}

SampleResult to_global(const SummaryMessage& m, std::size_t shard_stride, double log_normalizer) {
  return {static_cast<std::size_t>(m.rank) * shard_stride + *m.local_sample, log_normalizer};
}

}  // namespace

SampleResult coordinator_select(std::span<const SummaryMessage> messages, RngKey key, std::uint32_t row,
                                std::size_t shard_stride) {
  const SummaryMessage* winner = nullptr;
  double best = kNegInf;
  OnlineLogSumExp lse;
  for (const SummaryMessage& m : messages) {
    if (m.log_mass == kNegInf || !m.local_sample) continue;
    lse.add(m.log_mass);
    const double score = m.log_mass + outer_gumbel(key, row, m.rank);
    if (winner == nullptr || score > best || (score == best && m.rank < winner->rank)) {
      best = score;
      winner = &m;
    }
  }
  if (winner == nullptr) throw UndefinedDistributionError("every shard has zero mass for row " + std::to_string(row));
  return to_global(*winner, shard_stride, lse.value());
}

SampleResult tree_select(std::span<const SummaryMessage> messages, RngKey key, std::uint32_t row,
                         std::size_t shard_stride) {
  struct Node {
    const SummaryMessage* message = nullptr;
    double score = kNegInf;
    double log_mass = kNegInf;
  };
  std::vector<const SummaryMessage*> ordered;
  for (const auto& m : messages) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->rank < b->rank; });

  std::vector<Node> level;
  for (const SummaryMessage* m : ordered) {
    Node n;
    if (m->log_mass != kNegInf && m->local_sample) {
      n = {m, m->log_mass + outer_gumbel(key, row, m->rank), m->log_mass};
    }
    level.push_back(n);
  }
  while (level.size() > 1) {
    std::vector<Node> next;
    for (std::size_t i = 0; i < level.size(); i += 2) {
      if (i + 1 == level.size()) {
        next.push_back(level[i]);
        continue;
      }
      const Node& left = level[i];
      const Node& right = level[i + 1];
      Node merged = (right.message != nullptr && (left.message == nullptr || right.score > left.score)) ? right : left;
      merged.log_mass = logaddexp(left.log_mass, right.log_mass);
      next.push_back(merged);
    }
    level = std::move(next);
  }
  if (level.empty() || level.front().message == nullptr) {
    throw UndefinedDistributionError("every shard has zero mass for row " + std::to_string(row));
  }
  return to_global(*level.front().message, shard_stride, level.front().log_mass);
}

namespace {

void append_logit(std::vector<std::byte>& payload, double value, Precision precision) {
  const auto f = static_cast<float>(value);
  if (precision == Precision::Bf16) {
    const auto bits = static_cast<std::uint16_t>(std::bit_cast<std::uint32_t>(round_to_bf16(f)) >> 16);
    const auto* p = reinterpret_cast<const std::byte*>(&bits);
    payload.insert(payload.end(), p, p + 2);
  } else {
    const auto* p = reinterpret_cast<const std::byte*>(&f);
    payload.insert(payload.end(), p, p + 4);
  }
}

double read_logit(std::span<const std::byte> payload, std::size_t i, Precision precision) {
  if (precision == Precision::Bf16) {
    std::uint16_t bits = 0;
    std::memcpy(&bits, payload.data() + 2 * i, 2);
    return std::bit_cast<float>(static_cast<std::uint32_t>(bits) << 16);
  }
  float f = 0;
  std::memcpy(&f, payload.data() + 4 * i, 4);
  return f;
}

}  // namespace

DistributedOutput run_distributed_sample(const HiddenStates& h, const LmHeadWeights& w, const TransformSpec& t,
                                         RngKey key, std::size_t world_size, const DistributedOptions& opts,
                                         Transport* transport) {
  if (h.dim() != w.dim()) throw ShapeError("hidden dim differs from weight dim");
  t.validate(w.vocab());
  opts.tiling.validate();
  const auto shards = partition_vocab(w.vocab(), world_size);
  const std::size_t stride = w.vocab() / world_size;

  Transport local_transport(world_size);
  Transport& channel = transport != nullptr ? *transport : local_transport;
  std::vector<TrafficLedger> ledgers(world_size);

  detail::parallel_for(world_size, opts.threads, [&](std::size_t k) {
    const ShardSpec& shard = shards[k];
    const LmHeadWeights w_shard = w.slice(shard.vocab_range.begin, shard.vocab_range.end);
    if (opts.exchange == ExchangeMode::Summaries) {
      for (const SummaryMessage& m : rank_local_summaries(shard, w_shard, h, t, key, opts.tiling, 0, &ledgers[k])) {
        const SummaryPayload payload = m.encode();
        channel.send({m.rank, m.row, "summary", std::vector<std::byte>(payload.begin(), payload.end())});
      }
      return;
    }
    // Naive exchange: the rank materializes its local logits and ships them.
    const std::size_t width = shard.vocab_range.size();
    Matrix<double> logits(h.batch(), width);
    if (width > 0) {
      blocked_matmul_tile(h, w_shard, {0, h.batch()}, {0, width}, opts.tiling.k_tile, logits, &ledgers[k]);
      ledgers[k].logits_write_bytes += h.batch() * width * w.element_bytes();
    }
    for (std::size_t b = 0; b < h.batch(); ++b) {
      std::vector<std::byte> payload;
      payload.reserve(width * w.element_bytes());
      for (std::size_t i = 0; i < width; ++i) append_logit(payload, logits(b, i), w.precision());
      channel.send({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(b), "logits", std::move(payload)});
    }
  });

  const std::vector<Envelope> envelopes = channel.drain();
  if (envelopes.size() != h.batch() * world_size) throw ContractError("transport lost or duplicated messages");

  DistributedOutput out;
  out.samples.reserve(h.batch());
  for (std::size_t b = 0; b < h.batch(); ++b) {
    const auto row_envelopes = std::span(envelopes).subspan(b * world_size, world_size);
    const auto row = static_cast<std::uint32_t>(b);
    if (opts.exchange == ExchangeMode::Summaries) {
      std::vector<SummaryMessage> messages;
      for (const Envelope& e : row_envelopes) {
        if (e.payload.size() != kSummaryPayloadBytes) throw ContractError("summary payload depends on shard width");
        messages.push_back(SummaryMessage::decode(e.rank, e.row, e.payload));
      }
      out.samples.push_back(opts.reduce == ReduceMode::Tree ? tree_select(messages, key, row, stride)
                                                            : coordinator_select(messages, key, row, stride));
    } else {
      LogitsRow full(w.vocab());
      for (const Envelope& e : row_envelopes) {
        const ShardSpec& shard = shards[e.rank];
        for (std::size_t i = 0; i < shard.vocab_range.size(); ++i) {
          full[shard.vocab_range.begin + i] = read_logit(e.payload, i, w.precision());
        }
      }
      out.samples.push_back(streaming_gumbel_max(full, t, key, row, {.with_log_normalizer = true}));
    }
  }
  out.transport = channel.stats();
  for (const auto& l : ledgers) out.ledger += l;
  return out;
}

}  // namespace flashsample
