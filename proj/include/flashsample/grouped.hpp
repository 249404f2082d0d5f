#pragma once

// Group-Gumbel-Max. The vocabulary is cut into contiguous groups of size g
// (last one ragged). Each group contributes its log-mass L_k and an exact
// local sample; a categorical draw over {L_k} picks the group.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "flashsample/reference.hpp"
#include "flashsample/rng.hpp"

namespace flashsample {

struct GroupSummary {
  std::size_t group_id = 0;
  double log_mass = kNegInf;
  std::optional<std::size_t> local_sample;  // present iff log_mass is finite
};

struct OnlineState {
  double running_log_mass = kNegInf;
  std::optional<std::size_t> current_sample;  // global index

  bool initialized() const noexcept { return current_sample.has_value(); }
};

// group_logits are already transformed. Noise for local position j is drawn
// at stream position global_offset + j of row b.
GroupSummary group_summary(std::span<const double> group_logits, RngKey key, std::uint32_t b, std::size_t group_id,
                           std::size_t global_offset, GumbelMode mode = GumbelMode::Exact64);

std::size_t group_count(std::size_t vocab, std::size_t group_size) noexcept;

// Parallel variant. Always fills log_normalizer.
SampleResult parallel_group_sample(std::span<const double> row, const TransformSpec& t, RngKey key,
                                   std::size_t group_size, std::uint32_t b = 0, unsigned threads = 1);

// Probability that the merge replaces the running sample:
// exp(L_k - logsumexp(running, L_k)).
double replace_probability(double running_log_mass, double group_log_mass) noexcept;

// Binary merge of one nonzero-mass group into the running state. The first
// merge initializes the state and ignores u. `global_offset` maps the group's
// local sample to a global index.
OnlineState online_merge(const OnlineState& state, const GroupSummary& s, UniformOpen01 u,
                         std::size_t global_offset);

// Online variant: streams groups in index order with O(g) working memory.
// Within-group samples are drawn only for groups that win their merge.
SampleResult online_group_sample(std::span<const double> row, const TransformSpec& t, RngKey key,
                                 std::size_t group_size, std::uint32_t b = 0);

}  // namespace flashsample
