#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace pm25::test {

using nn::LayerSpec;

std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("pm25_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * nn::uniform01(rng); }

haze::RgbImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::vector<float> v(w * h * 3);
  for (auto& x : v) x = static_cast<float>(nn::uniform01(rng));
  return haze::RgbImage(w, h, std::move(v));
}

haze::Map2D brute_dark_channel(const haze::RgbImage& img, std::size_t patch) {
  const long r = static_cast<long>(patch / 2);
  const long W = static_cast<long>(img.width()), H = static_cast<long>(img.height());
  haze::Map2D out(img.width(), img.height());
  for (long y = 0; y < H; ++y) {
    for (long x = 0; x < W; ++x) {
      double m = 1e300;
      for (long dy = -r; dy <= r; ++dy) {
        for (long dx = -r; dx <= r; ++dx) {
          const long xx = std::clamp(x + dx, 0L, W - 1), yy = std::clamp(y + dy, 0L, H - 1);
          for (std::size_t c = 0; c < 3; ++c) m = std::min<double>(m, img.at(xx, yy, c));
        }
      }
      out.at(x, y) = m;
    }
  }
  return out;
}

haze::Map2D brute_transmission(const haze::RgbImage& img, const haze::Rgb& a, std::size_t patch) {
  const long r = static_cast<long>(patch / 2);
  const long W = static_cast<long>(img.width()), H = static_cast<long>(img.height());
  haze::Map2D out(img.width(), img.height());
  for (long y = 0; y < H; ++y) {
    for (long x = 0; x < W; ++x) {
      double m = 1e300;
      for (long dy = -r; dy <= r; ++dy) {
        for (long dx = -r; dx <= r; ++dx) {
          const long xx = std::clamp(x + dx, 0L, W - 1), yy = std::clamp(y + dy, 0L, H - 1);
          for (std::size_t c = 0; c < 3; ++c) m = std::min(m, img.at(xx, yy, c) / a[c]);
        }
      }
      out.at(x, y) = std::clamp(1.0 - m, 0.0, 1.0);
    }
  }
  return out;
}

haze::RgbImage haze_overlay(const haze::RgbImage& img, double t, double airlight) {
  std::vector<float> v(img.data().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<float>(std::clamp(t * img.data()[i] + (1.0 - t) * airlight, 0.0, 1.0));
  }
  return haze::RgbImage(img.width(), img.height(), std::move(v));
}

NaiveMetrics naive_metrics(const std::vector<double>& pred, const std::vector<double>& obs) {
  const std::size_t n = pred.size();
  double abs_sum = 0.0, sq_sum = 0.0, obs_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    abs_sum += std::fabs(obs[i] - pred[i]);
    sq_sum += std::pow(obs[i] - pred[i], 2);
    obs_sum += obs[i];
  }
  const double mean = obs_sum / n;
  double tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) tot += std::pow(obs[i] - mean, 2);
  return {abs_sum / n, sq_sum / n, std::sqrt(sq_sum / n), 1.0 - sq_sum / tot};
}

model::ImageSet brightness_set(std::size_t n, std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  model::ImageSet set;
  set.images = nn::Tensor(nn::Shape::nhwc(n, h, w, 3));
  const std::size_t per = h * w * 3;
  for (std::size_t b = 0; b < n; ++b) {
    const double base = (static_cast<double>(b) + 0.5) / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      const float v = static_cast<float>(std::clamp(base + 0.2 * (nn::uniform01(rng) - 0.5), 0.0, 1.0));
      set.images[b * per + i] = v;
      sum += v;
    }
    set.labels.push_back(static_cast<float>(sum / static_cast<double>(per) * 500.0));
  }
  return set;
}

const char* to_string(GradKind kind) {
  switch (kind) {
    case GradKind::Conv: return "conv";
    case GradKind::BatchNorm: return "batchnorm(train)";
    case GradKind::Pool: return "maxpool";
    case GradKind::Dense: return "dense";
    case GradKind::ReLU: return "relu";
    case GradKind::Dropout: return "dropout(off)";
  }
  return "?";
}

std::vector<LayerSpec> grad_case_layers(GradKind kind) {
  const auto head = LayerSpec::dense(1, nn::Activation::Linear);
  switch (kind) {
    case GradKind::Conv:
      return {LayerSpec::zero_pad(1, 1), LayerSpec::conv2d(3, nn::Activation::ReLU), LayerSpec::conv2d(2, nn::Activation::Linear),
              LayerSpec::flatten(), head};
    case GradKind::BatchNorm:
      return {LayerSpec::conv2d(3, nn::Activation::ReLU), LayerSpec::batch_norm(), LayerSpec::flatten(), head};
    case GradKind::Pool:
      return {LayerSpec::conv2d(3, nn::Activation::Linear), LayerSpec::max_pool(), LayerSpec::flatten(), head};
    case GradKind::Dense:
      return {LayerSpec::flatten(), LayerSpec::dense(5, nn::Activation::ReLU), LayerSpec::dense(3, nn::Activation::Linear),
              head};
    case GradKind::ReLU:
      return {LayerSpec::flatten(), LayerSpec::dense(6, nn::Activation::Linear), LayerSpec::relu(), head};
    case GradKind::Dropout:
      return {LayerSpec::flatten(), LayerSpec::dense(4, nn::Activation::ReLU), LayerSpec::dropout(0.0), head,
              LayerSpec::linear_output()};
  }
  return {};
}

GradCase make_grad_case(GradKind kind, std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed);
  for (;;) {
    const std::size_t h = 5 + rng() % 3, w = 5 + rng() % 3, c = 2 + rng() % 2, batch = 2 + rng() % 2;
    nn::Network<double> net(nn::Shape::nhwc(1, h, w, c), grad_case_layers(kind), rng());
    // Move biases off zero so ReLU inputs are not pinned to the hinge.
    for (auto& p : net.trainable_parameters()) {
      if (p.ref.name == "bias" || p.ref.name == "shift") {
        for (auto& v : p.ref.value->values()) v = uniform(rng, -0.3, 0.3);
      } else if (p.ref.name == "scale") {
        for (auto& v : p.ref.value->values()) v = uniform(rng, 0.5, 1.5);
      }
    }
    auto x = random_tensor<double>(nn::Shape::nhwc(batch, h, w, c), rng);
    std::vector<double> targets(batch);
    for (auto& t : targets) t = uniform(rng, -1.0, 1.0);
    nn::Network<double> probe = net;
    probe.forward(x, nn::Mode::Train);
    if (probe.kink_margin() < margin) continue;
    return {std::move(net), std::move(x), std::move(targets)};
  }
}

}  // namespace pm25::test
