#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "flashsample/errors.hpp"

namespace flashsample {

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw ShapeError("matrix data size does not match rows*cols");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Storage precision tag for the LM-head weights. Values are always held as
// float; Bf16 rounds them on construction and is accounted at 2 bytes.
enum class Precision { Bf16, Fp32 };

std::size_t bytes_per_element(Precision p) noexcept;
std::string_view to_string(Precision p);
Precision parse_precision(std::string_view text);

// Round-to-nearest-even to the nearest bfloat16 value.
float round_to_bf16(float x) noexcept;

// H: B x D.
class HiddenStates {
 public:
  explicit HiddenStates(Matrix<float> values);
  std::size_t batch() const noexcept { return values_.rows(); }
  std::size_t dim() const noexcept { return values_.cols(); }
  const Matrix<float>& values() const noexcept { return values_; }
  std::span<const float> row(std::size_t b) const { return values_.row(b); }

 private:
  Matrix<float> values_;
};

// W: V x D.
class LmHeadWeights {
 public:
  LmHeadWeights(Matrix<float> values, Precision precision);
  std::size_t vocab() const noexcept { return values_.rows(); }
  std::size_t dim() const noexcept { return values_.cols(); }
  Precision precision() const noexcept { return precision_; }
  std::size_t element_bytes() const noexcept { return bytes_per_element(precision_); }
  const Matrix<float>& values() const noexcept { return values_; }
  std::span<const float> row(std::size_t i) const { return values_.row(i); }

  // Rows [begin, end) as a standalone shard.
  LmHeadWeights slice(std::size_t begin, std::size_t end) const;

 private:
  Matrix<float> values_;
  Precision precision_;
};

}  // namespace flashsample
