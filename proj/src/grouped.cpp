#include "flashsample/grouped.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flashsample/detail/parallel.hpp"
#include "flashsample/errors.hpp"

namespace flashsample {

namespace {

std::optional<std::size_t> local_argmax(std::span<const double> logits, RngKey key, std::uint32_t b,
                                        std::size_t global_offset, GumbelMode mode) {
  double best_score = kNegInf;
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (logits[j] == kNegInf) continue;
    const double score = logits[j] + token_gumbel(key, b, global_offset + j, mode);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

}  // namespace

std::size_t group_count(std::size_t vocab, std::size_t group_size) noexcept {
  return (vocab + group_size - 1) / group_size;
}

GroupSummary group_summary(std::span<const double> group_logits, RngKey key, std::uint32_t b, std::size_t group_id,
                           std::size_t global_offset, GumbelMode mode) {
  GroupSummary s;
  s.group_id = group_id;
  s.log_mass = logsumexp(group_logits);
  if (s.log_mass != kNegInf) s.local_sample = local_argmax(group_logits, key, b, global_offset, mode);
  return s;
}

SampleResult parallel_group_sample(std::span<const double> row, const TransformSpec& t, RngKey key,
                                   std::size_t group_size, std::uint32_t b, unsigned threads) {
  if (group_size == 0) throw ContractError("group size must be >= 1");
  const LogitsRow transformed = apply_transform(row, t);
  const std::size_t groups = group_count(transformed.size(), group_size);

  std::vector<GroupSummary> summaries(groups);
  detail::parallel_for(groups, threads, [&](std::size_t k) {
    const std::size_t begin = k * group_size;
    const std::size_t end = std::min(transformed.size(), begin + group_size);
    summaries[k] = group_summary(std::span(transformed).subspan(begin, end - begin), key, b, k, begin);
  });

  double best_score = kNegInf;
  const GroupSummary* winner = nullptr;
  OnlineLogSumExp lse;
  for (const GroupSummary& s : summaries) {
    if (s.log_mass == kNegInf) continue;
    lse.add(s.log_mass);
    const double score = s.log_mass + gumbel_from_uniform(derive_uniform(key, {b, s.group_id, StreamDomain::OuterGroup}));
    if (winner == nullptr || score > best_score) {
      best_score = score;
      winner = &s;
    }
  }
  // apply_transform already rejected rows without a finite logit.
  return {winner->group_id * group_size + *winner->local_sample, lse.value()};
}

double replace_probability(double running_log_mass, double group_log_mass) noexcept {
  if (group_log_mass == kNegInf) return 0.0;
  return std::exp(group_log_mass - logaddexp(running_log_mass, group_log_mass));
}

OnlineState online_merge(const OnlineState& state, const GroupSummary& s, UniformOpen01 u,
                         std::size_t global_offset) {
  if (s.log_mass == kNegInf || !s.local_sample) {
    throw ContractError("zero-mass groups must be skipped before merging");
  }
  if (!state.initialized()) return {s.log_mass, global_offset + *s.local_sample};

  OnlineState next = state;
  if (u.value() < replace_probability(state.running_log_mass, s.log_mass)) {
    next.current_sample = global_offset + *s.local_sample;
  }
  next.running_log_mass = logaddexp(state.running_log_mass, s.log_mass);
  return next;
}

SampleResult online_group_sample(std::span<const double> row, const TransformSpec& t, RngKey key,
                                 std::size_t group_size, std::uint32_t b) {
  if (group_size == 0) throw ContractError("group size must be >= 1");
  t.validate(row.size());

  std::vector<double> buffer(group_size);
  OnlineState state;
  const std::size_t groups = group_count(row.size(), group_size);
  for (std::size_t k = 0; k < groups; ++k) {
    const std::size_t begin = k * group_size;
    const std::size_t width = std::min(row.size(), begin + group_size) - begin;
    const std::span<double> group(buffer.data(), width);
    for (std::size_t j = 0; j < width; ++j) group[j] = t.apply(row[begin + j], begin + j);

    const double log_mass = logsumexp(group);
    if (log_mass == kNegInf) continue;

    if (!state.initialized()) {
      state.running_log_mass = log_mass;
      state.current_sample = begin + *local_argmax(group, key, b, begin, GumbelMode::Exact64);
      continue;
    }
    // Per-token counters of a group are consumed only when it wins the merge.
    const double u = derive_uniform(key, {b, k, StreamDomain::MergeBernoulli}).value();
    if (u < replace_probability(state.running_log_mass, log_mass)) {
      state.current_sample = begin + *local_argmax(group, key, b, begin, GumbelMode::Exact64);
    }
    state.running_log_mass = logaddexp(state.running_log_mass, log_mass);
  }
  if (!state.initialized()) throw UndefinedDistributionError("every transformed logit is -inf");
  return {*state.current_sample, state.running_log_mass};
}

}  // namespace flashsample
