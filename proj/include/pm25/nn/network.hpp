#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pm25/errors.hpp"
#include "pm25/nn/layers.hpp"

namespace pm25::nn {

// Raised when a layer list cannot be chained; carries the offending index.
class BuildError : public ShapeError {
 public:
  BuildError(std::size_t layer_index, const std::string& what);
  std::size_t layer_index() const { return index_; }

 private:
  std::size_t index_;
};

template <typename T>
struct NamedParam {
  std::size_t layer = 0;
  ParamRef<T> ref;
};

// Called after each layer during forward(): (layer index, activation).
template <typename T>
using LayerObserver = std::function<void(std::size_t, const BasicTensor<T>&)>;

// A sequential stack of layers.
template <typename T>
class Network {
 public:
  using TensorT = BasicTensor<T>;

  // `input_sample` is the per-sample shape, e.g. (1, 120, 200, 3).
  Network(Shape input_sample, std::vector<LayerSpec> specs, std::uint64_t seed);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const Shape& input_shape() const { return input_; }
  const std::vector<LayerSpec>& specs() const { return specs_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  // Swaps in a replacement with the same spec and input shape.
  void replace_layer(std::size_t i, std::unique_ptr<Layer<T>> layer);

  // Training-path forward pass; caches intermediates for backward(). Throws
  // NumericError naming the layer whose output is not finite.
  TensorT forward(const TensorT& x, Mode mode, const LayerObserver<T>& observer = {});
  // Cache-free inference; safe to call concurrently on a shared network.
  TensorT infer(const TensorT& x) const;
  // Reverse pass from dLoss/dOutput. Accumulates into parameter gradients and
  // returns dLoss/dInput.
  TensorT backward(const TensorT& loss_grad);
  void zero_grad();

  std::vector<NamedParam<T>> parameters();
  std::vector<NamedParam<T>> trainable_parameters();

  std::size_t parameter_count() const;
  std::size_t trainable_parameter_count() const;

  // Static per-layer output shapes for a given batch size.
  std::vector<Shape> layer_output_shapes(std::size_t batch) const;

  // Sets every dropout layer to `rate` and restarts its mask stream from
  // `seed`. Throws ShapeError for a rate outside [0, 1).
  void set_dropout(double rate, std::uint64_t seed);

  double kink_margin() const;
  bool has_forward_cache() const { return forward_cached_; }

 private:
  void check_input(const TensorT& x) const;

  Shape input_;
  std::vector<LayerSpec> specs_;
  std::uint64_t seed_ = 0;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  bool forward_cached_ = false;
};

template <typename T>
struct LossResult {
  double value = 0.0;
  BasicTensor<T> grad;
};

// Mean squared error over a (batch, 1) prediction and its targets.
template <typename T>
LossResult<T> mse_loss(const BasicTensor<T>& predictions, std::span<const T> targets);

// Copies every parameter array (trainable and running state) from `src` into
// `dst`; both must share the same layer specs.
template <typename T, typename U>
void copy_parameters(Network<T>& dst, const Network<U>& src);

extern template class Network<float>;
extern template class Network<double>;

}  // namespace pm25::nn
