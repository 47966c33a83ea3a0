#include "pm25/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "kernels.hpp"
#include "pm25/errors.hpp"

namespace pm25::nn {

namespace {

std::string layer_name(const LayerSpec& spec) { return std::string(to_string(spec.kind)); }

template <typename T>
void he_uniform(BasicTensor<T>& w, std::size_t fan_in, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (auto& v : w.values()) v = static_cast<T>((2.0 * uniform01(rng) - 1.0) * limit);
}

// Applies max(0, .) in place and returns min |pre-activation|.
template <typename T>
double apply_relu(BasicTensor<T>& t) {
  double margin = std::numeric_limits<double>::infinity();
  for (auto& v : t.values()) {
    margin = std::min(margin, std::abs(static_cast<double>(v)));
    if (v < T{0}) v = T{0};
  }
  return margin;
}

template <typename T>
BasicTensor<T> relu_masked(const BasicTensor<T>& grad, const BasicTensor<T>& activated) {
  BasicTensor<T> out(grad.shape());
  for (std::size_t i = 0; i < grad.size(); ++i) out[i] = activated[i] > T{0} ? grad[i] : T{0};
  return out;
}

struct ConvIndex {
  std::vector<std::size_t> poff;  // receptive-field corner per output pixel
  std::vector<std::size_t> koff;  // (ky, kx, c) window offsets
};

ConvIndex conv_index(std::size_t batch, const Shape& in, const Shape& out) {
  const std::size_t h = in.height(), w = in.width(), c = in.channels();
  const std::size_t ho = out.height(), wo = out.width();
  ConvIndex idx;
  idx.poff.reserve(batch * ho * wo);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t y = 0; y < ho; ++y) {
      for (std::size_t x = 0; x < wo; ++x) idx.poff.push_back(((b * h + y) * w + x) * c);
    }
  }
  idx.koff.reserve(9 * c);
  for (std::size_t ky = 0; ky < 3; ++ky) {
    for (std::size_t kx = 0; kx < 3; ++kx) {
      for (std::size_t ch = 0; ch < c; ++ch) idx.koff.push_back((ky * w + kx) * c + ch);
    }
  }
  return idx;
}

std::vector<std::size_t> iota_scaled(std::size_t n, std::size_t stride) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i * stride;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Layer

template <typename T>
Layer<T>::Layer(LayerSpec spec, Shape input_sample)
    : spec_(spec), input_(input_sample.with_batch(1)), output_(spec_.output_shape(input_)) {}

template <typename T>
void Layer<T>::zero_grad() {
  for (auto& p : params()) {
    if (p.grad) p.grad->fill(T{0});
  }
}

template <typename T>
void Layer<T>::check_input(const TensorT& x) const {
  const Shape& s = x.shape();
  bool ok = s.rank() == input_.rank();
  for (std::size_t i = 1; ok && i < s.rank(); ++i) ok = s[i] == input_[i];
  if (!ok) {
    throw ShapeError(layer_name(spec_) + ": expected input " + input_.to_string(true) + ", got " + s.to_string());
  }
  if (s.batch() == 0) throw ShapeError(layer_name(spec_) + ": zero-size batch");
}

template <typename T>
void Layer<T>::check_grad(const TensorT& g) const {
  const Shape expected = output_.with_batch(cached_batch_);
  if (!(g.shape() == expected)) {
    throw ShapeError(layer_name(spec_) + ": expected upstream gradient " + expected.to_string() + ", got " +
                     g.shape().to_string());
  }
}

template <typename T>
void Layer<T>::require_cache(const char* what) const {
  if (!has_cache()) throw UsageError(layer_name(spec_) + ": " + what + " called before forward");
}

// ---------------------------------------------------------------------------
// ZeroPad2D

template <typename T>
BasicTensor<T> ZeroPad2DLayer<T>::infer(const TensorT& x) const {
  this->check_input(x);
  const Shape& in = x.shape();
  const std::size_t b = in.batch(), h = in.height(), w = in.width(), c = in.channels();
  const std::size_t ph = this->spec_.pad_h, pw = this->spec_.pad_w;
  TensorT out(Shape::nhwc(b, h + 2 * ph, w + 2 * pw, c));
  const std::size_t ow = w + 2 * pw;
  for (std::size_t n = 0; n < b; ++n) {
    for (std::size_t y = 0; y < h; ++y) {
      const T* src = x.data() + ((n * h + y) * w) * c;
      T* dst = out.data() + ((n * (h + 2 * ph) + y + ph) * ow + pw) * c;
      std::memcpy(dst, src, w * c * sizeof(T));
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> ZeroPad2DLayer<T>::forward(const TensorT& x, Mode) {
  auto out = infer(x);
  this->cached_batch_ = x.shape().batch();
  return out;
}

template <typename T>
BasicTensor<T> ZeroPad2DLayer<T>::backward(const TensorT& g) {
  this->require_cache("backward");
  this->check_grad(g);
  const std::size_t b = this->cached_batch_, h = this->input_.height(), w = this->input_.width(),
                    c = this->input_.channels();
  const std::size_t ph = this->spec_.pad_h, pw = this->spec_.pad_w;
  const std::size_t ow = w + 2 * pw;
  TensorT dx(this->input_.with_batch(b));
  for (std::size_t n = 0; n < b; ++n) {
    for (std::size_t y = 0; y < h; ++y) {
      const T* src = g.data() + ((n * (h + 2 * ph) + y + ph) * ow + pw) * c;
      std::memcpy(dx.data() + ((n * h + y) * w) * c, src, w * c * sizeof(T));
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Conv2D

template <typename T>
Conv2DLayer<T>::Conv2DLayer(LayerSpec spec, Shape input_sample, std::mt19937_64& rng)
    : Layer<T>(spec, input_sample) {
  const std::size_t cin = this->input_.channels(), cout = spec.filters;
  weights_ = TensorT(Shape{3, 3, cin, cout});
  bias_ = TensorT(Shape{cout});
  dweights_ = TensorT(weights_.shape());
  dbias_ = TensorT(bias_.shape());
  he_uniform(weights_, 9 * cin, rng);
}

template <typename T>
BasicTensor<T> Conv2DLayer<T>::compute(const TensorT& x) const {
  this->check_input(x);
  const std::size_t b = x.shape().batch();
  const Shape out_shape = this->output_.with_batch(b);
  const ConvIndex idx = conv_index(b, x.shape(), out_shape);
  TensorT out(out_shape);
  kernels::gather_gemm(idx.poff.size(), idx.koff.size(), out_shape.channels(), x.data(), idx.poff.data(),
                       idx.koff.data(), weights_.data(), bias_.data(), out.data());
  return out;
}

template <typename T>
BasicTensor<T> Conv2DLayer<T>::infer(const TensorT& x) const {
  auto out = compute(x);
  if (this->spec_.activation == Activation::ReLU) apply_relu(out);
  return out;
}

template <typename T>
BasicTensor<T> Conv2DLayer<T>::forward(const TensorT& x, Mode) {
  auto out = compute(x);
  margin_ = this->spec_.activation == Activation::ReLU ? apply_relu(out) : std::numeric_limits<double>::infinity();
  input_cache_ = x;
  output_cache_ = out;
  this->cached_batch_ = x.shape().batch();
  return out;
}

template <typename T>
BasicTensor<T> Conv2DLayer<T>::backward(const TensorT& grad_out) {
  this->require_cache("backward");
  this->check_grad(grad_out);
  const TensorT g =
      this->spec_.activation == Activation::ReLU ? relu_masked(grad_out, output_cache_) : grad_out;

  const std::size_t b = this->cached_batch_;
  const Shape in = input_cache_.shape();
  const Shape out = g.shape();
  const std::size_t cout = out.channels(), cin = in.channels();
  const std::size_t k_total = 9 * cin;
  const ConvIndex idx = conv_index(b, in, out);
  const std::size_t pixels = idx.poff.size();

  for (std::size_t p = 0; p < pixels; ++p) {
    const T* row = g.data() + p * cout;
    for (std::size_t n = 0; n < cout; ++n) dbias_[n] += row[n];
  }
  kernels::gather_gemm_at(pixels, k_total, cout, input_cache_.data(), idx.poff.data(), idx.koff.data(), g.data(),
                          dweights_.data());

  // dX: per-pixel window gradients (g . W^T), scattered back one sample at a time.
  TensorT wt(Shape{cout, k_total});
  for (std::size_t k = 0; k < k_total; ++k) {
    for (std::size_t n = 0; n < cout; ++n) wt[n * k_total + k] = weights_[k * cout + n];
  }
  const std::size_t per_sample = out.height() * out.width();
  const std::vector<std::size_t> gpoff = iota_scaled(per_sample, cout);
  const std::vector<std::size_t> gkoff = iota_scaled(cout, 1);
  std::vector<T> window(per_sample * k_total);
  TensorT dx(in);
  const std::size_t row_stride = in.width() * cin;
  const std::size_t span = 3 * cin;
  for (std::size_t s = 0; s < b; ++s) {
    kernels::gather_gemm(per_sample, cout, k_total, g.data() + s * per_sample * cout, gpoff.data(), gkoff.data(),
                         wt.data(), static_cast<const T*>(nullptr), window.data());
    for (std::size_t p = 0; p < per_sample; ++p) {
      T* base = dx.data() + idx.poff[s * per_sample + p];
      const T* src = window.data() + p * k_total;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        T* dst = base + ky * row_stride;
        const T* seg = src + ky * span;
        for (std::size_t j = 0; j < span; ++j) dst[j] += seg[j];
      }
    }
  }
  return dx;
}

template <typename T>
std::vector<ParamRef<T>> Conv2DLayer<T>::params() {
  return {{"weights", &weights_, &dweights_}, {"bias", &bias_, &dbias_}};
}

// ---------------------------------------------------------------------------
// BatchNorm

template <typename T>
BatchNormLayer<T>::BatchNormLayer(LayerSpec spec, Shape input_sample) : Layer<T>(spec, input_sample) {
  const std::size_t c = this->input_.channels();
  scale_ = TensorT(Shape{c}, T{1});
  shift_ = TensorT(Shape{c}, T{0});
  running_mean_ = TensorT(Shape{c}, T{0});
  running_var_ = TensorT(Shape{c}, T{1});
  dscale_ = TensorT(Shape{c});
  dshift_ = TensorT(Shape{c});
}

template <typename T>
BasicTensor<T> BatchNormLayer<T>::infer(const TensorT& x) const {
  this->check_input(x);
  const std::size_t c = this->input_.channels();
  const std::size_t m = x.size() / c;
  std::vector<double> mul(c), add(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(running_var_[ch]) + kEpsilon);
    mul[ch] = inv * scale_[ch];
    add[ch] = shift_[ch] - running_mean_[ch] * mul[ch];
  }
  TensorT out(x.shape());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      out[i * c + ch] = static_cast<T>(x[i * c + ch] * mul[ch] + add[ch]);
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> BatchNormLayer<T>::forward(const TensorT& x, Mode mode) {
  this->check_input(x);
  const std::size_t c = this->input_.channels();
  const std::size_t m = x.size() / c;
  std::vector<double> mean(c, 0.0), var(c, 0.0);
  if (mode == Mode::Train) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) mean[ch] += x[i * c + ch];
    }
    for (auto& v : mean) v /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double d = x[i * c + ch] - mean[ch];
        var[ch] += d * d;
      }
    }
    for (auto& v : var) v /= static_cast<double>(m);
    for (std::size_t ch = 0; ch < c; ++ch) {
      running_mean_[ch] = static_cast<T>(kMomentum * running_mean_[ch] + (1.0 - kMomentum) * mean[ch]);
      running_var_[ch] = static_cast<T>(kMomentum * running_var_[ch] + (1.0 - kMomentum) * var[ch]);
    }
  } else {
    for (std::size_t ch = 0; ch < c; ++ch) {
      mean[ch] = running_mean_[ch];
      var[ch] = running_var_[ch];
    }
  }

  inv_std_cache_.assign(c, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) inv_std_cache_[ch] = 1.0 / std::sqrt(var[ch] + kEpsilon);

  TensorT out(x.shape());
  normalized_cache_ = TensorT(x.shape());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double xhat = (x[i * c + ch] - mean[ch]) * inv_std_cache_[ch];
      normalized_cache_[i * c + ch] = static_cast<T>(xhat);
      out[i * c + ch] = static_cast<T>(scale_[ch] * xhat + shift_[ch]);
    }
  }
  cached_mode_ = mode;
  this->cached_batch_ = x.shape().batch();
  return out;
}

template <typename T>
BasicTensor<T> BatchNormLayer<T>::backward(const TensorT& g) {
  this->require_cache("backward");
  this->check_grad(g);
  const std::size_t c = this->input_.channels();
  const std::size_t m = g.size() / c;
  std::vector<double> sum_dy(c, 0.0), sum_dy_xhat(c, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      sum_dy[ch] += g[i * c + ch];
      sum_dy_xhat[ch] += static_cast<double>(g[i * c + ch]) * normalized_cache_[i * c + ch];
    }
  }
  for (std::size_t ch = 0; ch < c; ++ch) {
    dscale_[ch] += static_cast<T>(sum_dy_xhat[ch]);
    dshift_[ch] += static_cast<T>(sum_dy[ch]);
  }

  TensorT dx(g.shape());
  const double md = static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double dxhat_scale = scale_[ch] * inv_std_cache_[ch];
      const double dy = g[i * c + ch];
      if (cached_mode_ == Mode::Train) {
        dx[i * c + ch] = static_cast<T>(
            dxhat_scale * (dy - sum_dy[ch] / md - normalized_cache_[i * c + ch] * sum_dy_xhat[ch] / md));
      } else {
        dx[i * c + ch] = static_cast<T>(dxhat_scale * dy);
      }
    }
  }
  return dx;
}

template <typename T>
std::vector<ParamRef<T>> BatchNormLayer<T>::params() {
  return {{"scale", &scale_, &dscale_},
          {"shift", &shift_, &dshift_},
          {"running_mean", &running_mean_, nullptr},
          {"running_variance", &running_var_, nullptr}};
}

// ---------------------------------------------------------------------------
// MaxPool2D

template <typename T>
BasicTensor<T> MaxPool2DLayer<T>::pool(const TensorT& x, std::vector<std::uint32_t>* argmax, double* margin) const {
  this->check_input(x);
  const Shape& in = x.shape();
  const std::size_t b = in.batch(), h = in.height(), w = in.width(), c = in.channels();
  const std::size_t ho = h / 2, wo = w / 2;
  TensorT out(Shape::nhwc(b, ho, wo, c));
  if (argmax) argmax->resize(out.size());
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t o = 0;
  for (std::size_t n = 0; n < b; ++n) {
    for (std::size_t y = 0; y < ho; ++y) {
      for (std::size_t xq = 0; xq < wo; ++xq) {
        const std::size_t i00 = ((n * h + 2 * y) * w + 2 * xq) * c;
        const std::size_t cand[4] = {i00, i00 + c, i00 + w * c, i00 + w * c + c};
        for (std::size_t ch = 0; ch < c; ++ch, ++o) {
          std::size_t best = cand[0] + ch;
          for (int j = 1; j < 4; ++j) {
            if (x[cand[j] + ch] > x[best]) best = cand[j] + ch;
          }
          out[o] = x[best];
          if (argmax) (*argmax)[o] = static_cast<std::uint32_t>(best);
          if (margin) {
            for (int j = 0; j < 4; ++j) {
              if (cand[j] + ch != best) {
                min_gap = std::min(min_gap, static_cast<double>(x[best]) - static_cast<double>(x[cand[j] + ch]));
              }
            }
          }
        }
      }
    }
  }
  if (margin) *margin = min_gap;
  return out;
}

template <typename T>
BasicTensor<T> MaxPool2DLayer<T>::infer(const TensorT& x) const {
  return pool(x, nullptr, nullptr);
}

template <typename T>
BasicTensor<T> MaxPool2DLayer<T>::forward(const TensorT& x, Mode) {
  auto out = pool(x, &argmax_, &margin_);
  this->cached_batch_ = x.shape().batch();
  return out;
}

template <typename T>
BasicTensor<T> MaxPool2DLayer<T>::backward(const TensorT& g) {
  this->require_cache("backward");
  this->check_grad(g);
  TensorT dx(this->input_.with_batch(this->cached_batch_));
  for (std::size_t o = 0; o < g.size(); ++o) dx[argmax_[o]] += g[o];
  return dx;
}

// ---------------------------------------------------------------------------
// ReLU

template <typename T>
BasicTensor<T> ReLULayer<T>::infer(const TensorT& x) const {
  this->check_input(x);
  TensorT out = x;
  apply_relu(out);
  return out;
}

template <typename T>
BasicTensor<T> ReLULayer<T>::forward(const TensorT& x, Mode) {
  this->check_input(x);
  input_cache_ = x;
  TensorT out = x;
  margin_ = apply_relu(out);
  this->cached_batch_ = x.shape().batch();
  return out;
}

template <typename T>
BasicTensor<T> ReLULayer<T>::backward(const TensorT& g) {
  this->require_cache("backward");
  this->check_grad(g);
  return relu_masked(g, input_cache_);
}

// ---------------------------------------------------------------------------
// Flatten

template <typename T>
BasicTensor<T> FlattenLayer<T>::infer(const TensorT& x) const {
  this->check_input(x);
  return x.reshaped(this->output_.with_batch(x.shape().batch()));
}

template <typename T>
BasicTensor<T> FlattenLayer<T>::forward(const TensorT& x, Mode) {
  auto out = infer(x);
  this->cached_batch_ = x.shape().batch();
  return out;
}

template <typename T>
BasicTensor<T> FlattenLayer<T>::backward(const TensorT& g) {
  this->require_cache("backward");
  this->check_grad(g);
  return g.reshaped(this->input_.with_batch(this->cached_batch_));
}

// ---------------------------------------------------------------------------
// Dense

template <typename T>
DenseLayer<T>::DenseLayer(LayerSpec spec, Shape input_sample, std::mt19937_64& rng) : Layer<T>(spec, input_sample) {
  const std::size_t in = this->input_.channels(), out = spec.units;
  weights_ = TensorT(Shape{in, out});
  bias_ = TensorT(Shape{out});
  dweights_ = TensorT(weights_.shape());
  dbias_ = TensorT(bias_.shape());
  he_uniform(weights_, in, rng);
}

template <typename T>
BasicTensor<T> DenseLayer<T>::compute(const TensorT& x) const {
  this->check_input(x);
  const std::size_t b = x.shape().batch(), in = this->input_.channels(), units = this->spec_.units;
  TensorT out(Shape::flat(b, units));
  const auto poff = iota_scaled(b, in);
  const auto koff = iota_scaled(in, 1);
  kernels::gather_gemm(b, in, units, x.data(), poff.data(), koff.data(), weights_.data(), bias_.data(), out.data());
  return out;
}

template <typename T>
BasicTensor<T> DenseLayer<T>::infer(const TensorT& x) const {
  auto out = compute(x);
  if (this->spec_.activation == Activation::ReLU) apply_relu(out);
  return out;
}

template <typename T>
BasicTensor<T> DenseLayer<T>::forward(const TensorT& x, Mode) {
  auto out = compute(x);
  margin_ = this->spec_.activation == Activation::ReLU ? apply_relu(out) : std::numeric_limits<double>::infinity();
  input_cache_ = x;
  output_cache_ = out;
  this->cached_batch_ = x.shape().batch();
  return out;
}

template <typename T>
BasicTensor<T> DenseLayer<T>::backward(const TensorT& grad_out) {
  this->require_cache("backward");
  this->check_grad(grad_out);
  const TensorT g =
      this->spec_.activation == Activation::ReLU ? relu_masked(grad_out, output_cache_) : grad_out;
  const std::size_t b = this->cached_batch_, in = this->input_.channels(), units = this->spec_.units;
  for (std::size_t n = 0; n < b; ++n) {
    for (std::size_t u = 0; u < units; ++u) dbias_[u] += g[n * units + u];
  }
  const auto poff = iota_scaled(b, in);
  const auto koff = iota_scaled(in, 1);
  kernels::gather_gemm_at(b, in, units, input_cache_.data(), poff.data(), koff.data(), g.data(), dweights_.data());

  TensorT dx(Shape::flat(b, in));
  for (std::size_t n = 0; n < b; ++n) {
    const T* grow = g.data() + n * units;
    for (std::size_t i = 0; i < in; ++i) {
      const T* wrow = weights_.data() + i * units;
      T acc{0};
      for (std::size_t u = 0; u < units; ++u) acc += grow[u] * wrow[u];
      dx[n * in + i] = acc;
    }
  }
  return dx;
}

template <typename T>
std::vector<ParamRef<T>> DenseLayer<T>::params() {
  return {{"weights", &weights_, &dweights_}, {"bias", &bias_, &dbias_}};
}

// ---------------------------------------------------------------------------
// Dropout

template <typename T>
DropoutLayer<T>::DropoutLayer(LayerSpec spec, Shape input_sample, std::uint64_t seed)
    : Layer<T>(spec, input_sample), rng_(seed) {}

template <typename T>
BasicTensor<T> DropoutLayer<T>::infer(const TensorT& x) const {
  this->check_input(x);
  return x;
}

template <typename T>
BasicTensor<T> DropoutLayer<T>::forward(const TensorT& x, Mode mode) {
  this->check_input(x);
  this->cached_batch_ = x.shape().batch();
  if (!active_in(mode)) {
    mask_.clear();
    return x;
  }
  const double rate = this->spec_.rate;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  mask_.resize(x.size());
  TensorT out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask_[i] = uniform01(rng_) < rate ? T{0} : keep_scale;
    out[i] = x[i] * mask_[i];
  }
  return out;
}

template <typename T>
BasicTensor<T> DropoutLayer<T>::backward(const TensorT& g) {
  this->require_cache("backward");
  this->check_grad(g);
  if (mask_.empty()) return g;
  TensorT dx(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * mask_[i];
  return dx;
}

// ---------------------------------------------------------------------------
// Identity

template <typename T>
BasicTensor<T> IdentityLayer<T>::infer(const TensorT& x) const {
  this->check_input(x);
  return x;
}

template <typename T>
BasicTensor<T> IdentityLayer<T>::forward(const TensorT& x, Mode) {
  this->check_input(x);
  this->cached_batch_ = x.shape().batch();
  return x;
}

template <typename T>
BasicTensor<T> IdentityLayer<T>::backward(const TensorT& g) {
  this->require_cache("backward");
  this->check_grad(g);
  return g;
}

// ---------------------------------------------------------------------------

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_sample, std::mt19937_64& rng) {
  switch (spec.kind) {
    case LayerKind::ZeroPad2D:
      return std::make_unique<ZeroPad2DLayer<T>>(spec, input_sample);
    case LayerKind::Conv2D:
      return std::make_unique<Conv2DLayer<T>>(spec, input_sample, rng);
    case LayerKind::BatchNorm:
      return std::make_unique<BatchNormLayer<T>>(spec, input_sample);
    case LayerKind::MaxPool2D:
      return std::make_unique<MaxPool2DLayer<T>>(spec, input_sample);
    case LayerKind::ReLU:
      return std::make_unique<ReLULayer<T>>(spec, input_sample);
    case LayerKind::Flatten:
      return std::make_unique<FlattenLayer<T>>(spec, input_sample);
    case LayerKind::Dense:
      return std::make_unique<DenseLayer<T>>(spec, input_sample, rng);
    case LayerKind::Dropout:
      return std::make_unique<DropoutLayer<T>>(spec, input_sample, rng());
    case LayerKind::LinearOutput:
      return std::make_unique<IdentityLayer<T>>(spec, input_sample);
  }
  throw ShapeError("unknown layer kind");
}

#define PM25_INSTANTIATE_LAYERS(T)                                                                         \
  template class Layer<T>;                                                                                 \
  template class ZeroPad2DLayer<T>;                                                                        \
  template class Conv2DLayer<T>;                                                                           \
  template class BatchNormLayer<T>;                                                                        \
  template class MaxPool2DLayer<T>;                                                                        \
  template class ReLULayer<T>;                                                                             \
  template class FlattenLayer<T>;                                                                          \
  template class DenseLayer<T>;                                                                            \
  template class DropoutLayer<T>;                                                                          \
  template class IdentityLayer<T>;                                                                         \
  template std::unique_ptr<Layer<T>> make_layer<T>(const LayerSpec&, const Shape&, std::mt19937_64&);

PM25_INSTANTIATE_LAYERS(float)
PM25_INSTANTIATE_LAYERS(double)

#undef PM25_INSTANTIATE_LAYERS

}  // namespace pm25::nn
