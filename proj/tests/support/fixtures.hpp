#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pm25/haze/features.hpp"
#include "pm25/metrics/metrics.hpp"
#include "pm25/model/train.hpp"
#include "pm25/nn/grad_check.hpp"

namespace pm25::test {

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

double uniform(std::mt19937_64& rng, double lo, double hi);

template <typename T>
nn::BasicTensor<T> random_tensor(const nn::Shape& shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  nn::BasicTensor<T> t(shape);
  for (auto& v : t.values()) v = static_cast<T>(uniform(rng, lo, hi));
  return t;
}

haze::RgbImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng);

// Window scans written directly from the definitions.
haze::Map2D brute_dark_channel(const haze::RgbImage& img, std::size_t patch);
haze::Map2D brute_transmission(const haze::RgbImage& img, const haze::Rgb& a, std::size_t patch);

// I' = t I + (1 - t) A with a constant grey air-light.
haze::RgbImage haze_overlay(const haze::RgbImage& img, double t, double airlight);

// Two-pass sums in the most literal form.
struct NaiveMetrics {
  double mae, mse, rmse, r2;
};
NaiveMetrics naive_metrics(const std::vector<double>& pred, const std::vector<double>& obs);

// n images of size h x w whose label is mean brightness * 500; each image
// has its own base level plus noise so the labels are spread out.
model::ImageSet brightness_set(std::size_t n, std::size_t h, std::size_t w, std::uint64_t seed);

// Small networks for the gradient check, one per layer kind. Each ends in
// Dense(1, linear) so the MSE loss applies.
enum class GradKind { Conv, BatchNorm, Pool, Dense, ReLU, Dropout };
const char* to_string(GradKind kind);
std::vector<nn::LayerSpec> grad_case_layers(GradKind kind);

struct GradCase {
  nn::Network<double> net;
  nn::TensorD input;
  std::vector<double> targets;
};

// Random instance for `kind`. Instances whose forward pass sits within
// `margin` of a ReLU hinge or pool tie are redrawn, since a central
// difference across a kink measures a different one-sided slope.
GradCase make_grad_case(GradKind kind, std::uint64_t seed, double margin);

}  // namespace pm25::test
