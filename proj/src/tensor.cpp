#include "flashsample/tensor.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace flashsample {

std::size_t bytes_per_element(Precision p) noexcept { return p == Precision::Bf16 ? 2 : 4; }

std::string_view to_string(Precision p) { return p == Precision::Bf16 ? "bf16" : "fp32"; }

Precision parse_precision(std::string_view text) {
  if (text == "bf16") return Precision::Bf16;
  if (text == "fp32") return Precision::Fp32;
  throw ContractError("unknown precision '" + std::string(text) + "'");
}

float round_to_bf16(float x) noexcept {
  if (std::isnan(x)) return x;
  auto bits = std::bit_cast<std::uint32_t>(x);
  bits += 0x7FFFu + ((bits >> 16) & 1u);
  return std::bit_cast<float>(bits & 0xFFFF0000u);
}

HiddenStates::HiddenStates(Matrix<float> values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) throw ShapeError("hidden states need B >= 1 and D >= 1");
}

LmHeadWeights::LmHeadWeights(Matrix<float> values, Precision precision)
    : values_(std::move(values)), precision_(precision) {
  if (values_.rows() == 0 || values_.cols() == 0) throw ShapeError("weights need V >= 1 and D >= 1");
  if (precision_ == Precision::Bf16) {
    for (float& v : values_.data()) v = round_to_bf16(v);
  }
}

LmHeadWeights LmHeadWeights::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > vocab()) throw ShapeError("weight slice out of range");
  const auto flat = values_.data();
  std::vector<float> data(flat.begin() + static_cast<std::ptrdiff_t>(begin * dim()),
                          flat.begin() + static_cast<std::ptrdiff_t>(end * dim()));
  // Bypasses the constructor check so an empty shard (begin == end) is allowed.
  LmHeadWeights shard = *this;
  shard.values_ = Matrix<float>(end - begin, dim(), std::move(data));
  return shard;
}

}  // namespace flashsample
