#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pm25::nn {

// Up to rank-4 extents. Activations are NHWC (batch, height, width, channels);
// flattened activations are rank 2 (batch, features); biases are rank 1.
class Shape {
 public:
  static constexpr std::size_t kMaxRank = 4;

  Shape() = default;
  Shape(std::initializer_list<std::size_t> dims);

  static Shape nhwc(std::size_t b, std::size_t h, std::size_t w, std::size_t c) { return {b, h, w, c}; }
  static Shape flat(std::size_t b, std::size_t features) { return {b, features}; }

  std::size_t rank() const { return rank_; }
  std::size_t operator[](std::size_t i) const { return dims_.at(i); }
  std::size_t count() const;

  // NHWC accessors. A rank-2 shape reads as (batch, 1, 1, features).
  std::size_t batch() const { return rank_ == 0 ? 0 : dims_[0]; }
  std::size_t height() const { return rank_ == 4 ? dims_[1] : 1; }
  std::size_t width() const { return rank_ == 4 ? dims_[2] : 1; }
  std::size_t channels() const { return rank_ == 0 ? 0 : dims_[rank_ - 1]; }

  Shape with_batch(std::size_t b) const;
  std::vector<std::size_t> dims() const { return {dims_.begin(), dims_.begin() + rank_}; }

  // "(1, 126, 206, 3)"; with_none renders the batch as "None" like a layer table.
  std::string to_string(bool with_none = false) const;

  friend bool operator==(const Shape& a, const Shape& b);

 private:
  std::array<std::size_t, kMaxRank> dims_{};
  std::size_t rank_ = 0;
};

template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  explicit BasicTensor(Shape shape, T fill = T{});
  BasicTensor(Shape shape, std::vector<T> values);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  // NHWC element access (rank 4).
  T& at(std::size_t b, std::size_t h, std::size_t w, std::size_t c) { return data_[offset(b, h, w, c)]; }
  const T& at(std::size_t b, std::size_t h, std::size_t w, std::size_t c) const {
    return data_[offset(b, h, w, c)];
  }

  // Same data, new extents; throws ShapeError when the element count differs.
  BasicTensor reshaped(Shape shape) const&;
  BasicTensor reshaped(Shape shape) &&;

  void fill(T v);
  bool all_finite() const;

  // Samples [first, first + n) along the batch axis.
  BasicTensor slice_batch(std::size_t first, std::size_t n) const;

  template <typename U>
  BasicTensor<U> cast() const {
    BasicTensor<U> out(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  std::size_t offset(std::size_t b, std::size_t h, std::size_t w, std::size_t c) const {
    return ((b * shape_[1] + h) * shape_[2] + w) * shape_[3] + c;
  }

  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

// Gathers samples by index along the batch axis.
template <typename T>
BasicTensor<T> gather_batch(const BasicTensor<T>& src, std::span<const std::size_t> indices);

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

}  // namespace pm25::nn
