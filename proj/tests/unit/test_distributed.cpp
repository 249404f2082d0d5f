#include <gtest/gtest.h>

#include <cmath>
#include "json.hpp"
#include <random>
#include <sstream>

#include "flashsample/distributed.hpp"
#include "flashsample/errors.hpp"
#include "flashsample/stat_verify.hpp"
#include "flashsample/workload.hpp"

using namespace flashsample;

namespace {

Workload make_work(std::size_t b, std::size_t v, std::size_t d, std::uint64_t seed) {
  WorkloadConfig cfg;
  cfg.batch = b;
  cfg.vocab = v;
  cfg.dim = d;
  cfg.seed = seed;
  cfg.precision = Precision::Fp32;
  return generate_synthetic(cfg);
}

Workload column(const LogitsRow& row, std::size_t n) {
  Matrix<float> h(n, 1, 1.0f);
  Matrix<float> w(row.size(), 1);
  for (std::size_t i = 0; i < row.size(); ++i) w(i, 0) = static_cast<float>(row[i]);
  return {HiddenStates(h), LmHeadWeights(w, Precision::Fp32)};
}

SummaryMessage msg(std::uint32_t rank, double log_mass, std::optional<std::uint32_t> local) {
  SummaryMessage m;
  m.rank = rank;
  m.log_mass = log_mass;
  m.local_sample = local;
  return m;
}

}  // namespace

TEST(Partition, StrideAndRemainder) {
  const auto shards = partition_vocab(10, 3);
  ASSERT_EQ(shards.size(), 3u);
  EXPECT_EQ(shards[0].vocab_range.begin, 0u);
  EXPECT_EQ(shards[0].vocab_range.end, 3u);
  EXPECT_EQ(shards[1].vocab_range.begin, 3u);
  EXPECT_EQ(shards[2].vocab_range.begin, 6u);
  EXPECT_EQ(shards[2].vocab_range.end, 10u);
  EXPECT_THROW(partition_vocab(10, 0), ContractError);
  EXPECT_THROW(make_shard(10, 2, 2), ContractError);
}

TEST(Partition, CoversVocabularyProperty) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t v = 1 + rng() % 5000;
    const std::size_t n = 1 + rng() % 16;
    std::size_t next = 0;
    for (const auto& s : partition_vocab(v, n)) {
      EXPECT_EQ(s.vocab_range.begin, next);
      next = s.vocab_range.end;
    }
    EXPECT_EQ(next, v);
  }
}

TEST(Summary, EncodeDecodeRoundTrip) {
  SummaryMessage m = msg(3, -1.25, 77);
  m.row = 9;
  const auto payload = m.encode();
  EXPECT_EQ(payload.size(), 16u);
  const auto back = SummaryMessage::decode(3, 9, payload);
  EXPECT_EQ(back.log_mass, -1.25);
  EXPECT_EQ(back.local_sample, 77u);
  const auto empty = SummaryMessage::decode(1, 0, msg(1, kNegInf, std::nullopt).encode());
  EXPECT_EQ(empty.log_mass, kNegInf);
  EXPECT_FALSE(empty.local_sample.has_value());
  std::vector<std::byte> short_payload(15);
  EXPECT_THROW(SummaryMessage::decode(0, 0, short_payload), ShapeError);
}

TEST(Summary, MaskedShardHasNegInfMass) {
  const LogitsRow row{1.0, 2.0, 3.0, 4.0};
  const Workload work = column(row, 1);
  std::vector<std::size_t> banned{2, 3};
  TransformSpec t;
  t.with_banned(banned);
  const ShardSpec shard = make_shard(4, 2, 1);
  const auto m = rank_local_summary(shard, work.w.slice(2, 4), work.h.row(0), t, RngKey{1}, 0);
  EXPECT_EQ(m.log_mass, kNegInf);
  EXPECT_FALSE(m.local_sample.has_value());
  const auto m0 = rank_local_summary(make_shard(4, 2, 0), work.w.slice(0, 2), work.h.row(0), t, RngKey{1}, 0);
  EXPECT_NEAR(m0.log_mass, std::log(std::exp(1.0) + std::exp(2.0)), 1e-12);
}

TEST(Summary, PayloadIndependentOfShardWidth) {
  for (std::size_t v : {1024u, 65536u}) {
    const Workload work = make_work(2, v, 4, 3);
    const auto out = run_distributed_sample(work.h, work.w, {}, RngKey{1}, 4);
    EXPECT_EQ(out.transport.total_bytes, 2u * 4u * 16u) << v;
    EXPECT_EQ(out.transport.messages_sent, 8u);
    for (auto b : out.transport.per_rank_bytes) EXPECT_EQ(b, 32u);
  }
}

TEST(Coordinator, ZeroMassShardNeverChosen) {
  const std::vector<SummaryMessage> ms{msg(0, 0.0, 5), msg(1, kNegInf, std::nullopt)};
  for (std::uint32_t row = 0; row < 2000; ++row) {
    EXPECT_EQ(coordinator_select(ms, RngKey{8}, row, 10).index, 5u);
    EXPECT_EQ(tree_select(ms, RngKey{8}, row, 10).index, 5u);
  }
  const std::vector<SummaryMessage> none{msg(0, kNegInf, std::nullopt), msg(1, kNegInf, std::nullopt)};
  EXPECT_THROW(coordinator_select(none, RngKey{0}, 0, 10), UndefinedDistributionError);
  EXPECT_THROW(tree_select(none, RngKey{0}, 0, 10), UndefinedDistributionError);
}

TEST(Coordinator, EqualMassSplitsEvenly) {
  const std::vector<SummaryMessage> ms{msg(0, 0.0, 0), msg(1, 0.0, 0)};
  std::vector<std::uint64_t> counts(2, 0);
  for (std::uint32_t row = 0; row < 10000; ++row) ++counts[coordinator_select(ms, RngKey{12}, row, 1).index];
  const std::vector<double> half{0.5, 0.5};
  EXPECT_TRUE(stats::chi_squared_gof(counts, half).pass) << counts[0] << " " << counts[1];
}

TEST(Coordinator, GatherAndTreeAgreeProperty) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 9;
    std::vector<SummaryMessage> ms;
    for (std::uint32_t k = 0; k < n; ++k) {
      if (rng() % 5 == 0) {
        ms.push_back(msg(k, kNegInf, std::nullopt));
      } else {
        ms.push_back(msg(k, static_cast<double>(rng() % 1000) / 100.0 - 5.0, static_cast<std::uint32_t>(rng() % 7)));
      }
    }
    const bool any = std::any_of(ms.begin(), ms.end(), [](const auto& m) { return m.local_sample.has_value(); });
    const RngKey key{rng()};
    if (!any) continue;
    const auto g = coordinator_select(ms, key, 3, 7);
    const auto t = tree_select(ms, key, 3, 7);
    EXPECT_EQ(g.index, t.index);
    EXPECT_NEAR(*g.log_normalizer, *t.log_normalizer, 1e-12 * std::max(1.0, std::fabs(*g.log_normalizer)));
  }
}

TEST(Distributed, SingleRankMatchesFused) {
  const Workload work = make_work(5, 300, 8, 9);
  const auto d = run_distributed_sample(work.h, work.w, {}, RngKey{6}, 1);
  const auto f = fused_matmul_sample(work.h, work.w, {}, RngKey{6});
  ASSERT_EQ(d.samples.size(), f.samples.size());
  for (std::size_t b = 0; b < 5; ++b) EXPECT_EQ(d.samples[b].index, f.samples[b].index);
}

TEST(Distributed, MoreRanksThanTokens) {
  const Workload work = make_work(3, 3, 4, 2);
  const auto out = run_distributed_sample(work.h, work.w, {}, RngKey{1}, 8);
  for (const auto& s : out.samples) EXPECT_LT(s.index, 3u);
}

TEST(Distributed, ReduceModesAndThreadsAgree) {
  const Workload work = make_work(6, 1001, 8, 5);
  DistributedOptions gather;
  DistributedOptions tree;
  tree.reduce = ReduceMode::Tree;
  tree.threads = 4;
  for (std::size_t n : {2u, 3u, 8u}) {
    const auto a = run_distributed_sample(work.h, work.w, {}, RngKey{2}, n, gather);
    const auto b = run_distributed_sample(work.h, work.w, {}, RngKey{2}, n, tree);
    for (std::size_t r = 0; r < 6; ++r) EXPECT_EQ(a.samples[r].index, b.samples[r].index);
    EXPECT_EQ(a.transport.total_bytes, 6u * n * 16u);
  }
}

TEST(Distributed, NaiveExchangeCostsOrderVocab) {
  const Workload work = make_work(2, 151936, 4, 1);
  DistributedOptions naive;
  naive.exchange = ExchangeMode::NaiveLogits;
  const auto summary = run_distributed_sample(work.h, work.w, {}, RngKey{1}, 8);
  const auto full = run_distributed_sample(work.h, work.w, {}, RngKey{1}, 8, naive);
  EXPECT_EQ(full.transport.total_bytes, 2u * 151936u * 4u);
  EXPECT_GE(full.transport.total_bytes / summary.transport.total_bytes, 1000u);
}

TEST(Distributed, GofAtV512) {
  LogitsRow row(512);
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<float>(std::sin(0.37 * static_cast<double>(i)) * 3.0);
  stats::SamplerFn fn = [](const LogitsRow& r, const TransformSpec& t, RngKey key, std::size_t n) {
    const Workload work = column(r, n);
    const auto out = run_distributed_sample(work.h, work.w, t, key, 4);
    std::vector<std::size_t> idx;
    for (const auto& s : out.samples) idx.push_back(s.index);
    return idx;
  };
  const auto r = stats::with_retry<stats::GofReport>(
      [&](RngKey k) { return stats::empirical_check(fn, row, {}, 5000, 0.01, k); }, RngKey{21});
  EXPECT_TRUE(r.pass);
}

TEST(Distributed, ShardLogitsConcatenateToFullRow) {
  const Workload work = make_work(3, 777, 16, 8);
  const Matrix<double> full = naive_logits(work.h, work.w);
  for (const auto& shard : partition_vocab(777, 5)) {
    const auto part = naive_logits(work.h, work.w.slice(shard.vocab_range.begin, shard.vocab_range.end));
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t i = 0; i < shard.vocab_range.size(); ++i) {
        EXPECT_EQ(part(b, i), full(b, shard.vocab_range.begin + i));
      }
    }
  }
}

TEST(Transport, TraceIsJsonLines) {
  const Workload work = make_work(2, 64, 4, 1);
  Transport transport(4);
  run_distributed_sample(work.h, work.w, {}, RngKey{1}, 4, {}, &transport);
  std::stringstream ss;
  transport.write_trace_jsonl(ss);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(ss, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("bytes").get<int>(), 16);
    EXPECT_EQ(j.at("tag").get<std::string>(), "summary");
    EXPECT_LT(j.at("rank").get<int>(), 4);
    ++lines;
  }
  EXPECT_EQ(lines, 8u);
  EXPECT_THROW(transport.send({9, 0, "x", {}}), ContractError);
}
