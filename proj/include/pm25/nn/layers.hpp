#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pm25/nn/layer_spec.hpp"
#include "pm25/nn/tensor.hpp"

namespace pm25::nn {

enum class Mode { Train, Infer };

// A named parameter array owned by a layer. `grad` is null for
// non-trainable state such as BatchNorm running statistics.
template <typename T>
struct ParamRef {
  std::string name;
  BasicTensor<T>* value = nullptr;
  BasicTensor<T>* grad = nullptr;

  bool trainable() const { return grad != nullptr; }
};

// One stage of a sequential network. forward() caches what backward() needs;
// infer() is the const, cache-free inference path.
template <typename T>
class Layer {
 public:
  using TensorT = BasicTensor<T>;

  Layer(LayerSpec spec, Shape input_sample);
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }
  LayerKind kind() const { return spec_.kind; }
  // Per-sample shapes (batch dimension 1).
  const Shape& input_shape() const { return input_; }
  const Shape& output_shape() const { return output_; }
  std::size_t parameter_count() const { return spec_.parameter_count(input_); }

  virtual TensorT forward(const TensorT& x, Mode mode) = 0;
  virtual TensorT infer(const TensorT& x) const = 0;
  // Accumulates parameter gradients and returns the gradient w.r.t. the input.
  virtual TensorT backward(const TensorT& grad_out) = 0;

  virtual std::vector<ParamRef<T>> params() { return {}; }
  void zero_grad();
  virtual std::unique_ptr<Layer> clone() const = 0;

  // Distance of the last cached forward pass from the nearest
  // non-differentiable point (ReLU hinge, max-pool tie). Infinite when the
  // layer is smooth.
  virtual double kink_margin() const { return std::numeric_limits<double>::infinity(); }

  bool has_cache() const { return cached_batch_ != 0; }

 protected:
  void check_input(const TensorT& x) const;
  void check_grad(const TensorT& g) const;
  void require_cache(const char* what) const;

  LayerSpec spec_;
  Shape input_;
  Shape output_;
  std::size_t cached_batch_ = 0;
};

template <typename T>
class ZeroPad2DLayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  using Layer<T>::Layer;

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ZeroPad2DLayer>(*this); }
};

// Valid 3x3 cross-correlation, stride 1, optional fused ReLU.
template <typename T>
class Conv2DLayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  Conv2DLayer(LayerSpec spec, Shape input_sample, std::mt19937_64& rng);

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::vector<ParamRef<T>> params() override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv2DLayer>(*this); }
  double kink_margin() const override { return margin_; }

  TensorT& weights() { return weights_; }
  TensorT& bias() { return bias_; }
  const TensorT& weights() const { return weights_; }
  const TensorT& bias() const { return bias_; }
  TensorT& weights_grad() { return dweights_; }
  TensorT& bias_grad() { return dbias_; }

 protected:
  TensorT compute(const TensorT& x) const;

  TensorT weights_;   // (3, 3, in_ch, out_ch)
  TensorT bias_;      // (out_ch)
  TensorT dweights_;
  TensorT dbias_;
  TensorT input_cache_;
  TensorT output_cache_;
  double margin_ = std::numeric_limits<double>::infinity();
};

// Per-channel normalisation over (batch, height, width).
template <typename T>
class BatchNormLayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  static constexpr double kEpsilon = 1e-3;
  static constexpr double kMomentum = 0.99;

  BatchNormLayer(LayerSpec spec, Shape input_sample);

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::vector<ParamRef<T>> params() override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<BatchNormLayer>(*this); }

  TensorT& scale() { return scale_; }
  TensorT& shift() { return shift_; }
  TensorT& running_mean() { return running_mean_; }
  TensorT& running_variance() { return running_var_; }

 private:
  TensorT scale_, shift_, running_mean_, running_var_;
  TensorT dscale_, dshift_;
  TensorT normalized_cache_;
  std::vector<double> inv_std_cache_;
  Mode cached_mode_ = Mode::Infer;
};

// 2x2 max pooling, stride 2; a trailing odd row/column is dropped.
template <typename T>
class MaxPool2DLayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  using Layer<T>::Layer;

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<MaxPool2DLayer>(*this); }
  double kink_margin() const override { return margin_; }

 private:
  TensorT pool(const TensorT& x, std::vector<std::uint32_t>* argmax, double* margin) const;

  std::vector<std::uint32_t> argmax_;
  double margin_ = std::numeric_limits<double>::infinity();
};

template <typename T>
class ReLULayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  using Layer<T>::Layer;

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ReLULayer>(*this); }
  double kink_margin() const override { return margin_; }

 private:
  TensorT input_cache_;
  double margin_ = std::numeric_limits<double>::infinity();
};

template <typename T>
class FlattenLayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  using Layer<T>::Layer;

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<FlattenLayer>(*this); }
};

// y = xW + b with optional fused ReLU.
template <typename T>
class DenseLayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  DenseLayer(LayerSpec spec, Shape input_sample, std::mt19937_64& rng);

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::vector<ParamRef<T>> params() override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<DenseLayer>(*this); }
  double kink_margin() const override { return margin_; }

  TensorT& weights() { return weights_; }
  TensorT& bias() { return bias_; }

 private:
  TensorT compute(const TensorT& x) const;

  TensorT weights_;  // (in, out)
  TensorT bias_;     // (out)
  TensorT dweights_, dbias_;
  TensorT input_cache_;
  TensorT output_cache_;
  double margin_ = std::numeric_limits<double>::infinity();
};

// Inverted dropout: survivors are scaled by 1/(1 - rate) during training so
// inference is the identity.
template <typename T>
class DropoutLayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;

  DropoutLayer(LayerSpec spec, Shape input_sample, std::uint64_t seed);

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<DropoutLayer>(*this); }

  double rate() const { return this->spec_.rate; }
  bool active_in(Mode mode) const { return mode == Mode::Train && rate() > 0.0; }

 private:
  std::mt19937_64 rng_;
  std::vector<T> mask_;  // per-element multiplier of the last training pass
};

// Identity; marks an explicitly linear output.
template <typename T>
class IdentityLayer : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  using Layer<T>::Layer;

  TensorT forward(const TensorT& x, Mode mode) override;
  TensorT infer(const TensorT& x) const override;
  TensorT backward(const TensorT& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<IdentityLayer>(*this); }
};

// Builds the layer for `spec` on a per-sample input shape. `rng` drives weight
// initialisation (He-uniform); dropout layers draw their own stream seed from it.
template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_sample, std::mt19937_64& rng);

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

extern template class Layer<float>;
extern template class Layer<double>;

}  // namespace pm25::nn
