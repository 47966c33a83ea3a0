#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "pm25/nn/network.hpp"

namespace pm25::model {

// Preprocessed image size fed to the network.
inline constexpr std::size_t kImageHeight = 120;
inline constexpr std::size_t kImageWidth = 200;
inline constexpr std::size_t kImageChannels = 3;

struct ModelSpec {
  nn::Shape input = nn::Shape::nhwc(1, kImageHeight, kImageWidth, kImageChannels);
  std::vector<nn::LayerSpec> layers;
};

// The full 19-layer regression network.
ModelSpec dcnn_model_spec(double dropout_rate = 0.10);

// ZeroPad, four [Conv8, BN, Pool] blocks, Flatten, Dense(1). About 3000
// parameters; trains in seconds at SGD lr 1e-4 on AQI-scale labels, where a
// hidden Dense layer would diverge. Meant for smoke runs and tests.
ModelSpec compact_model_spec();

// "dcnn" or "compact"; the compact stack has no dropout layer.
ModelSpec model_spec_by_name(std::string_view name, double dropout_rate = 0.10);

class Model {
 public:
  Model(const ModelSpec& spec, std::uint64_t seed);
  explicit Model(nn::Network<float> net);

  ModelSpec spec() const;
  nn::Network<float>& network() { return net_; }
  const nn::Network<float>& network() const { return net_; }
  std::size_t parameter_count() const { return net_.parameter_count(); }

 private:
  nn::Network<float> net_;
};

// Throws nn::BuildError naming the layer whose shapes do not chain.
Model build_model(const ModelSpec& spec, std::uint64_t seed);

// Inference-mode predictions for an (n, 120, 200, 3) batch (or whatever
// spatial size the model was built for), evaluated `chunk` images at a time.
std::vector<float> predict(const Model& model, const nn::Tensor& batch, std::size_t chunk = 8);

void save(const Model& model, const std::filesystem::path& path);
Model load(const std::filesystem::path& path);

}  // namespace pm25::model
