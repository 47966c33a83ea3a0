#include "pm25/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>

#include "pm25/errors.hpp"

namespace pm25::nn {

Shape::Shape(std::initializer_list<std::size_t> dims) {
  if (dims.size() > kMaxRank) throw ShapeError("shape rank exceeds 4");
  std::copy(dims.begin(), dims.end(), dims_.begin());
  rank_ = dims.size();
}

std::size_t Shape::count() const {
  if (rank_ == 0) return 0;
  return std::accumulate(dims_.begin(), dims_.begin() + rank_, std::size_t{1}, std::multiplies<>());
}

Shape Shape::with_batch(std::size_t b) const {
  Shape s = *this;
  if (s.rank_ == 0) throw ShapeError("cannot set batch on a rank-0 shape");
  s.dims_[0] = b;
  return s;
}

std::string Shape::to_string(bool with_none) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) os << ", ";
    if (i == 0 && with_none) {
      os << "None";
    } else {
      os << dims_[i];
    }
  }
  os << ')';
  return os.str();
}

bool operator==(const Shape& a, const Shape& b) {
  if (a.rank_ != b.rank_) return false;
  return std::equal(a.dims_.begin(), a.dims_.begin() + a.rank_, b.dims_.begin());
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill) : shape_(shape), data_(shape.count(), fill) {}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> values) : shape_(shape), data_(std::move(values)) {
  if (data_.size() != shape_.count()) {
    throw ShapeError("tensor of shape " + shape_.to_string() + " needs " + std::to_string(shape_.count()) +
                     " values, got " + std::to_string(data_.size()));
  }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::reshaped(Shape shape) const& {
  BasicTensor copy = *this;
  return std::move(copy).reshaped(shape);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::reshaped(Shape shape) && {
  if (shape.count() != data_.size()) {
    throw ShapeError("cannot reshape " + shape_.to_string() + " to " + shape.to_string());
  }
  shape_ = shape;
  return std::move(*this);
}

template <typename T>
void BasicTensor<T>::fill(T v) {
  std::fill(data_.begin(), data_.end(), v);
}

template <typename T>
bool BasicTensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template <typename T>
BasicTensor<T> BasicTensor<T>::slice_batch(std::size_t first, std::size_t n) const {
  if (first + n > shape_.batch()) {
    throw ShapeError("batch slice [" + std::to_string(first) + ", " + std::to_string(first + n) +
                     ") exceeds batch " + std::to_string(shape_.batch()));
  }
  const std::size_t per = shape_.batch() == 0 ? 0 : data_.size() / shape_.batch();
  BasicTensor out(shape_.with_batch(n));
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * per), n * per, out.data_.begin());
  return out;
}

template <typename T>
BasicTensor<T> gather_batch(const BasicTensor<T>& src, std::span<const std::size_t> indices) {
  const std::size_t b = src.shape().batch();
  const std::size_t per = b == 0 ? 0 : src.size() / b;
  BasicTensor<T> out(src.shape().with_batch(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= b) throw ShapeError("gather index " + std::to_string(indices[i]) + " out of range");
    std::memcpy(out.data() + i * per, src.data() + indices[i] * per, per * sizeof(T));
  }
  return out;
}

template class BasicTensor<float>;
template class BasicTensor<double>;
template BasicTensor<float> gather_batch(const BasicTensor<float>&, std::span<const std::size_t>);
template BasicTensor<double> gather_batch(const BasicTensor<double>&, std::span<const std::size_t>);

}  // namespace pm25::nn
