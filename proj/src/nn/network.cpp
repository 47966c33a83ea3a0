#include "pm25/nn/network.hpp"

#include <cmath>
#include <string>

namespace pm25::nn {

BuildError::BuildError(std::size_t layer_index, const std::string& what)
    : ShapeError("layer " + std::to_string(layer_index) + ": " + what), index_(layer_index) {}

template <typename T>
Network<T>::Network(Shape input_sample, std::vector<LayerSpec> specs, std::uint64_t seed)
    : input_(input_sample.rank() == 0 ? input_sample : input_sample.with_batch(1)),
      specs_(std::move(specs)),
      seed_(seed) {
  if (input_.rank() != 4) throw BuildError(0, "network input must be NHWC, got " + input_.to_string());
  std::mt19937_64 rng(seed);
  Shape current = input_;
  layers_.reserve(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    try {
      layers_.push_back(make_layer<T>(specs_[i], current, rng));
    } catch (const ShapeError& e) {
      throw BuildError(i, std::string(to_string(specs_[i].kind)) + ": " + e.what());
    }
    current = layers_.back()->output_shape();
  }
}

template <typename T>
Network<T>::Network(const Network& other)
    : input_(other.input_), specs_(other.specs_), seed_(other.seed_), forward_cached_(other.forward_cached_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

template <typename T>
Network<T>& Network<T>::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
void Network<T>::replace_layer(std::size_t i, std::unique_ptr<Layer<T>> layer) {
  if (!layer) throw UsageError("replace_layer: null layer");
  auto& current = layers_.at(i);
  if (!(layer->spec() == current->spec()) || !(layer->input_shape() == current->input_shape())) {
    throw BuildError(i, "replacement layer does not match the original spec");
  }
  current = std::move(layer);
  forward_cached_ = false;
}

template <typename T>
void Network<T>::check_input(const TensorT& x) const {
  const Shape& s = x.shape();
  if (s.rank() != 4 || s.height() != input_.height() || s.width() != input_.width() ||
      s.channels() != input_.channels()) {
    throw ShapeError("network expects input " + input_.to_string(true) + ", got " + s.to_string());
  }
}

template <typename T>
BasicTensor<T> Network<T>::forward(const TensorT& x, Mode mode, const LayerObserver<T>& observer) {
  check_input(x);
  forward_cached_ = false;
  TensorT current = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    current = layers_[i]->forward(current, mode);
    if (!current.all_finite()) {
      throw NumericError("layer " + std::to_string(i) + " (" + std::string(to_string(specs_[i].kind)) +
                         ") produced a non-finite value");
    }
    if (observer) observer(i, current);
  }
  forward_cached_ = true;
  return current;
}

template <typename T>
BasicTensor<T> Network<T>::infer(const TensorT& x) const {
  check_input(x);
  TensorT current = x;
  for (const auto& l : layers_) current = l->infer(current);
  return current;
}

template <typename T>
BasicTensor<T> Network<T>::backward(const TensorT& loss_grad) {
  if (!forward_cached_) throw UsageError("backward called before forward");
  TensorT g = loss_grad;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = layers_[i]->backward(g);
    if (!g.all_finite()) {
      throw NumericError("layer " + std::to_string(i) + " (" + std::string(to_string(specs_[i].kind)) +
                         ") produced a non-finite gradient");
    }
  }
  return g;
}

template <typename T>
void Network<T>::zero_grad() {
  for (auto& l : layers_) l->zero_grad();
}

template <typename T>
std::vector<NamedParam<T>> Network<T>::parameters() {
  std::vector<NamedParam<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto& p : layers_[i]->params()) out.push_back({i, p});
  }
  return out;
}

template <typename T>
std::vector<NamedParam<T>> Network<T>::trainable_parameters() {
  std::vector<NamedParam<T>> out;
  for (auto& p : parameters()) {
    if (p.ref.trainable()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::size_t Network<T>::parameter_count() const {
  std::size_t n = 0;
  for (auto& p : const_cast<Network*>(this)->parameters()) n += p.ref.value->size();
  return n;
}

template <typename T>
std::size_t Network<T>::trainable_parameter_count() const {
  std::size_t n = 0;
  for (auto& p : const_cast<Network*>(this)->trainable_parameters()) n += p.ref.value->size();
  return n;
}

template <typename T>
std::vector<Shape> Network<T>::layer_output_shapes(std::size_t batch) const {
  std::vector<Shape> out;
  out.reserve(layers_.size());
  for (const auto& l : layers_) out.push_back(l->output_shape().with_batch(batch));
  return out;
}

template <typename T>
void Network<T>::set_dropout(double rate, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (specs_[i].kind != LayerKind::Dropout) continue;
    LayerSpec s = specs_[i];
    s.rate = rate;
    s.output_shape(layers_[i]->input_shape());
    layers_[i] = std::make_unique<DropoutLayer<T>>(s, layers_[i]->input_shape(), rng());
    specs_[i] = s;
  }
  forward_cached_ = false;
}

template <typename T>
double Network<T>::kink_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : layers_) m = std::min(m, l->kink_margin());
  return m;
}

template <typename T>
LossResult<T> mse_loss(const BasicTensor<T>& predictions, std::span<const T> targets) {
  if (predictions.size() != targets.size() || predictions.shape().channels() != 1) {
    throw ShapeError("mse_loss: predictions " + predictions.shape().to_string() + " vs " +
                     std::to_string(targets.size()) + " targets");
  }
  if (targets.empty()) throw ShapeError("mse_loss: empty batch");
  LossResult<T> r;
  r.grad = BasicTensor<T>(predictions.shape());
  const double n = static_cast<double>(targets.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = static_cast<double>(predictions[i]) - static_cast<double>(targets[i]);
    sum += d * d;
    r.grad[i] = static_cast<T>(2.0 * d / n);
  }
  r.value = sum / n;
  return r;
}

template <typename T, typename U>
void copy_parameters(Network<T>& dst, const Network<U>& src) {
  if (!(dst.specs() == src.specs()) || !(dst.input_shape() == src.input_shape())) {
    throw ShapeError("copy_parameters: networks have different architectures");
  }
  auto d = dst.parameters();
  auto s = const_cast<Network<U>&>(src).parameters();
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto& dv = *d[i].ref.value;
    const auto& sv = *s[i].ref.value;
    for (std::size_t j = 0; j < dv.size(); ++j) dv[j] = static_cast<T>(sv[j]);
  }
}

template class Network<float>;
template class Network<double>;
template LossResult<float> mse_loss(const BasicTensor<float>&, std::span<const float>);
template LossResult<double> mse_loss(const BasicTensor<double>&, std::span<const double>);
template void copy_parameters(Network<float>&, const Network<float>&);
template void copy_parameters(Network<double>&, const Network<double>&);
template void copy_parameters(Network<double>&, const Network<float>&);
template void copy_parameters(Network<float>&, const Network<double>&);

}  // namespace pm25::nn
