#include "flashsample/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flashsample/errors.hpp"

namespace flashsample {

TransformSpec& TransformSpec::with_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ContractError("temperature must be positive and finite, got " + std::to_string(temperature));
  }
  temperature_ = temperature;
  return *this;
}

TransformSpec& TransformSpec::with_bias(std::vector<double> bias) {
  bias_ = std::move(bias);
  return *this;
}

TransformSpec& TransformSpec::with_banned(std::span<const std::size_t> banned) {
  banned_mask_.clear();
  for (std::size_t i : banned) {
    if (i >= banned_mask_.size()) banned_mask_.resize(i + 1, 0);
    banned_mask_[i] = 1;
  }
  return *this;
}

std::vector<std::size_t> TransformSpec::banned() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < banned_mask_.size(); ++i) {
    if (banned_mask_[i] != 0) out.push_back(i);
  }
  return out;
}

bool TransformSpec::is_identity() const noexcept {
  return temperature_ == 1.0 && bias_.empty() &&
         std::none_of(banned_mask_.begin(), banned_mask_.end(), [](std::uint8_t m) { return m != 0; });
}

void TransformSpec::validate(std::size_t vocab) const {
  if (!bias_.empty() && bias_.size() != vocab) {
    throw ContractError("bias has length " + std::to_string(bias_.size()) + " but V = " + std::to_string(vocab));
  }
  for (std::size_t i = vocab; i < banned_mask_.size(); ++i) {
    if (banned_mask_[i] != 0) throw ContractError("banned index " + std::to_string(i) + " >= V");
  }
}

double logsumexp(std::span<const double> values) noexcept {
  double max = kNegInf;
  for (double v : values) max = std::max(max, v);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double logaddexp(double a, double b) noexcept {
  const double hi = std::max(a, b);
  if (hi == kNegInf) return kNegInf;
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

void OnlineLogSumExp::add(double value) noexcept {
  if (value == kNegInf) return;
  if (value > max_) {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - value) + 1.0;
    max_ = value;
  } else {
    scaled_sum_ += std::exp(value - max_);
  }
}

void OnlineLogSumExp::merge(const OnlineLogSumExp& other) noexcept {
  if (other.max_ == kNegInf) return;
  if (other.max_ > max_) {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - other.max_) + other.scaled_sum_;
    max_ = other.max_;
  } else {
    scaled_sum_ += other.scaled_sum_ * std::exp(other.max_ - max_);
  }
}

double OnlineLogSumExp::value() const noexcept {
  return max_ == kNegInf ? kNegInf : max_ + std::log(scaled_sum_);
}

std::vector<double> exact_probabilities(std::span<const double> row) {
  double max = kNegInf;
  for (double v : row) max = std::max(max, v);
  if (max == kNegInf) throw UndefinedDistributionError("no finite logit in a row of " + std::to_string(row.size()));

  std::vector<double> probs(row.size());
  double z = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    probs[i] = std::exp(row[i] - max);
    z += probs[i];
  }
  for (double& p : probs) p /= z;
  return probs;
}

LogitsRow apply_transform(std::span<const double> row, const TransformSpec& t) {
  t.validate(row.size());
  LogitsRow out(row.size());
  bool any_finite = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    out[i] = t.apply(row[i], i);
    any_finite = any_finite || out[i] != kNegInf;
  }
  if (!any_finite) throw UndefinedDistributionError("every transformed logit is -inf");
  return out;
}

std::size_t prefix_sum_search(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (cumulative >= u) return i;
  }
  if (last_positive == probs.size()) throw UndefinedDistributionError("no positive probability");
  return last_positive;
}

SampleResult materialized_sample(std::span<const double> row, const TransformSpec& t, RngKey key,
                                 std::uint32_t b) {
  const LogitsRow transformed = apply_transform(row, t);
  const std::vector<double> probs = exact_probabilities(transformed);
  const double u = derive_uniform(key, {b, 0, StreamDomain::BaselineUniform}).value();
  return {prefix_sum_search(probs, u), std::nullopt};
}

SampleResult streaming_gumbel_max(std::span<const double> row, const TransformSpec& t, RngKey key,
                                  std::uint32_t b, const StreamingOptions& opts) {
  t.validate(row.size());
  double best_score = kNegInf;
  std::size_t best_index = row.size();
  OnlineLogSumExp lse;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const double logit = t.apply(row[i], i);
    if (logit == kNegInf) continue;
    if (opts.with_log_normalizer) lse.add(logit);
    const double score = logit + token_gumbel(key, b, i, opts.gumbel_mode);
    if (score > best_score) {
      best_score = score;
      best_index = i;
    }
  }
  if (best_index == row.size()) throw UndefinedDistributionError("every transformed logit is -inf");
  SampleResult result{best_index, std::nullopt};
  if (opts.with_log_normalizer) result.log_normalizer = lse.value();
  return result;
}

Matrix<double> naive_logits(const HiddenStates& h, const LmHeadWeights& w) {
  if (h.dim() != w.dim()) {
    throw ShapeError("hidden dim " + std::to_string(h.dim()) + " vs weight dim " + std::to_string(w.dim()));
  }
  Matrix<double> out(h.batch(), w.vocab());
  for (std::size_t b = 0; b < h.batch(); ++b) {
    const auto hb = h.row(b);
    for (std::size_t i = 0; i < w.vocab(); ++i) {
      const auto wi = w.row(i);
      double acc = 0.0;
      for (std::size_t d = 0; d < h.dim(); ++d) acc += static_cast<double>(hb[d]) * static_cast<double>(wi[d]);
      out(b, i) = acc;
    }
  }
  return out;
}

}  // namespace flashsample
