#pragma once

// Ground-truth samplers and numeric primitives over materialized logits.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "flashsample/rng.hpp"
#include "flashsample/tensor.hpp"

namespace flashsample {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using LogitsRow = std::vector<double>;

// Deterministic logits transform: temperature, then additive bias, then mask.
// Bias and mask are indexed by global vocabulary position.
class TransformSpec {
 public:
  TransformSpec() = default;

  TransformSpec& with_temperature(double temperature);
  TransformSpec& with_bias(std::vector<double> bias);
  TransformSpec& with_banned(std::span<const std::size_t> banned);

  double temperature() const noexcept { return temperature_; }
  const std::vector<double>& bias() const noexcept { return bias_; }
  std::vector<std::size_t> banned() const;
  bool is_banned(std::size_t global_index) const noexcept {
    return global_index < banned_mask_.size() && banned_mask_[global_index] != 0;
  }
  bool is_identity() const noexcept;

  // Throws ContractError if the transform cannot apply to a vocabulary of size V.
  void validate(std::size_t vocab) const;

  double apply(double logit, std::size_t global_index) const noexcept {
    if (is_banned(global_index)) return kNegInf;
    double value = logit / temperature_;
    if (!bias_.empty()) value += bias_[global_index];
    return value;
  }

 private:
  double temperature_ = 1.0;
  std::vector<double> bias_;
  std::vector<std::uint8_t> banned_mask_;
};

struct SampleResult {
  std::size_t index = 0;
  std::optional<double> log_normalizer;

  friend bool operator==(const SampleResult&, const SampleResult&) = default;
};

// log(sum(exp(values))) with max shifting; -inf for empty or all -inf input.
double logsumexp(std::span<const double> values) noexcept;

// log(exp(a) + exp(b)).
double logaddexp(double a, double b) noexcept;

// Running logsumexp accumulator (one pass, rescales on a new max).
class OnlineLogSumExp {
 public:
  void add(double value) noexcept;
  void merge(const OnlineLogSumExp& other) noexcept;
  double value() const noexcept;

 private:
  double max_ = kNegInf;
  double scaled_sum_ = 0.0;
};

// Softmax probabilities. Throws UndefinedDistributionError when no entry is
// finite.
std::vector<double> exact_probabilities(std::span<const double> row);

// Throws UndefinedDistributionError if every transformed entry is -inf.
LogitsRow apply_transform(std::span<const double> row, const TransformSpec& t);

// min{i : c_i >= u} over the prefix sums of probs; falls back to the last
// positive-probability index when rounding leaves c_V < u.
std::size_t prefix_sum_search(std::span<const double> probs, double u);

// Softmax then inverse-CDF search, consuming one BaselineUniform draw at (b, 0).
SampleResult materialized_sample(std::span<const double> row, const TransformSpec& t, RngKey key,
                                 std::uint32_t b);

struct StreamingOptions {
  bool with_log_normalizer = false;
  GumbelMode gumbel_mode = GumbelMode::Exact64;
};

// Single pass argmax of transformed logit + Gumbel noise at (b, i). Strict
// comparison, so ties go to the smaller index.
SampleResult streaming_gumbel_max(std::span<const double> row, const TransformSpec& t, RngKey key,
                                  std::uint32_t b, const StreamingOptions& opts = {});

// logits[b, i] = sum_d H[b, d] * W[i, d], accumulated in double in order of d.
Matrix<double> naive_logits(const HiddenStates& h, const LmHeadWeights& w);

}  // namespace flashsample
