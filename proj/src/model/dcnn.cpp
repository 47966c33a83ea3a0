#include "pm25/model/dcnn.hpp"

#include <algorithm>
#include <string>

#include "pm25/errors.hpp"
#include "pm25/nn/checkpoint.hpp"

namespace pm25::model {

using nn::LayerSpec;

namespace {

std::vector<LayerSpec> stack(const std::size_t (&filters)[5], std::size_t dense_units, double dropout_rate) {
  std::vector<LayerSpec> l;
  l.push_back(LayerSpec::zero_pad(3, 3));
  l.push_back(LayerSpec::conv2d(filters[0]));
  l.push_back(LayerSpec::batch_norm());
  for (std::size_t i = 1; i < 5; ++i) {
    l.push_back(LayerSpec::conv2d(filters[i]));
    l.push_back(LayerSpec::batch_norm());
    l.push_back(LayerSpec::max_pool());
  }
  l.push_back(LayerSpec::flatten());
  l.push_back(LayerSpec::dense(dense_units, nn::Activation::ReLU));
  l.push_back(LayerSpec::dropout(dropout_rate));
  l.push_back(LayerSpec::dense(1, nn::Activation::Linear));
  return l;
}

}  // namespace

ModelSpec dcnn_model_spec(double dropout_rate) {
  ModelSpec s;
  s.layers = stack({32, 64, 128, 256, 512}, 128, dropout_rate);
  return s;
}

ModelSpec compact_model_spec() {
  ModelSpec s;
  s.layers.push_back(LayerSpec::zero_pad(3, 3));
  for (int i = 0; i < 4; ++i) {
    s.layers.push_back(LayerSpec::conv2d(8));
    s.layers.push_back(LayerSpec::batch_norm());
    s.layers.push_back(LayerSpec::max_pool());
  }
  s.layers.push_back(LayerSpec::flatten());
  s.layers.push_back(LayerSpec::dense(1, nn::Activation::Linear));
  return s;
}

ModelSpec model_spec_by_name(std::string_view name, double dropout_rate) {
  if (name == "dcnn") return dcnn_model_spec(dropout_rate);
  if (name == "compact") return compact_model_spec();
  throw ConfigError("unknown architecture '" + std::string(name) + "' (expected dcnn or compact)");
}

Model::Model(const ModelSpec& spec, std::uint64_t seed) : net_(spec.input, spec.layers, seed) {}

Model::Model(nn::Network<float> net) : net_(std::move(net)) {}

ModelSpec Model::spec() const { return {net_.input_shape(), net_.specs()}; }

Model build_model(const ModelSpec& spec, std::uint64_t seed) { return Model(spec, seed); }

std::vector<float> predict(const Model& model, const nn::Tensor& batch, std::size_t chunk) {
  const auto& in = model.network().input_shape();
  const auto& s = batch.shape();
  if (s.rank() != 4 || s.height() != in.height() || s.width() != in.width() || s.channels() != in.channels()) {
    throw ShapeError("predict expects a batch shaped " + in.to_string(true) + ", got " + s.to_string());
  }
  if (chunk == 0) throw UsageError("predict: chunk size must be positive");
  const std::size_t n = s.batch();
  std::vector<float> out;
  out.reserve(n);
  for (std::size_t first = 0; first < n; first += chunk) {
    const std::size_t count = std::min(chunk, n - first);
    const nn::Tensor y = model.network().infer(batch.slice_batch(first, count));
    if (y.size() != count) throw ShapeError("model output is not one value per image: " + y.shape().to_string());
    out.insert(out.end(), y.values().begin(), y.values().end());
  }
  return out;
}

void save(const Model& model, const std::filesystem::path& path) { nn::save_checkpoint(model.network(), path); }

Model load(const std::filesystem::path& path) { return Model(nn::load_checkpoint(path)); }

}  // namespace pm25::model
