#include "pm25/haze/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pm25/errors.hpp"

namespace pm25::haze {

namespace {

void require_non_empty(const RgbImage& img, const char* what) {
  if (img.empty()) throw DomainError(std::string(what) + ": empty image");
}

void check_patch(std::size_t patch) {
  if (patch == 0 || patch % 2 == 0) {
    throw DomainError("patch size must be odd and positive, got " + std::to_string(patch));
  }
}

void check_mask(const RgbImage& img, const SkyMask& mask, const char* what) {
  if (mask.width != img.width() || mask.height != img.height()) {
    throw DomainError(std::string(what) + ": mask size differs from image");
  }
  if (std::none_of(mask.values.begin(), mask.values.end(), [](unsigned char m) { return m != 0; })) {
    throw DomainError(std::string(what) + ": empty sky mask");
  }
}

// Separable min filter; clamping the window to the image is the same as
// replicating the edge pixels.
Map2D min_filter(const Map2D& src, std::size_t patch) {
  const std::size_t r = patch / 2;
  const std::size_t w = src.width, h = src.height;
  Map2D rows(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t x0 = x >= r ? x - r : 0, x1 = std::min(w - 1, x + r);
      double m = src.at(x0, y);
      for (std::size_t i = x0 + 1; i <= x1; ++i) m = std::min(m, src.at(i, y));
      rows.at(x, y) = m;
    }
  }
  Map2D out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t y0 = y >= r ? y - r : 0, y1 = std::min(h - 1, y + r);
    for (std::size_t x = 0; x < w; ++x) {
      double m = rows.at(x, y0);
      for (std::size_t j = y0 + 1; j <= y1; ++j) m = std::min(m, rows.at(x, j));
      out.at(x, y) = m;
    }
  }
  return out;
}

}  // namespace

RgbImage::RgbImage(std::size_t width, std::size_t height, std::vector<float> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
  if (data_.size() != width * height * 3) {
    throw DomainError("RgbImage " + std::to_string(width) + "x" + std::to_string(height) + " needs " +
                      std::to_string(width * height * 3) + " values, got " + std::to_string(data_.size()));
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 1.0f)) throw DomainError("RgbImage values must lie in [0, 1]");
  }
}

RgbImage::RgbImage(std::size_t width, std::size_t height, std::array<float, 3> colour)
    : width_(width), height_(height), data_(width * height * 3) {
  for (float v : colour) {
    if (!(v >= 0.0f && v <= 1.0f)) throw DomainError("RgbImage values must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < width * height; ++i) std::copy(colour.begin(), colour.end(), data_.begin() + 3 * i);
}

double RgbImage::luminance(std::size_t x, std::size_t y) const {
  const float* p = &data_[(y * width_ + x) * 3];
  return (299.0 * p[0] + 587.0 * p[1] + 114.0 * p[2]) / 1000.0;
}

double beer_lambert(double beta, double distance) {
  if (!(beta >= 0.0) || !(distance >= 0.0)) throw DomainError("beer_lambert: beta and distance must be non-negative");
  return std::exp(-beta * distance);
}

Map2D dark_channel(const RgbImage& img, std::size_t patch) {
  check_patch(patch);
  Map2D mins(img.width(), img.height());
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      mins.at(x, y) = std::min({img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
    }
  }
  return min_filter(mins, patch);
}

Rgb estimate_airlight(const RgbImage& img, const Map2D& dark) {
  require_non_empty(img, "estimate_airlight");
  if (dark.width != img.width() || dark.height != img.height()) {
    throw DomainError("estimate_airlight: dark channel size differs from image");
  }
  const std::size_t n = img.pixels();
  const std::size_t top = std::max<std::size_t>(1, n / 1000);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dark.values[a] > dark.values[b]; });
  Rgb sum{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < top; ++i) {
    for (std::size_t c = 0; c < 3; ++c) sum[c] += img.data()[idx[i] * 3 + c];
  }
  for (double& s : sum) s /= static_cast<double>(top);
  return sum;
}

Map2D transmission_map(const RgbImage& img, const Rgb& airlight, std::size_t patch) {
  check_patch(patch);
  for (double a : airlight) {
    if (!(a > 0.0)) throw DomainError("transmission_map: air-light components must be positive");
  }
  Map2D mins(img.width(), img.height());
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      double m = img.at(x, y, 0) / airlight[0];
      m = std::min(m, img.at(x, y, 1) / airlight[1]);
      m = std::min(m, img.at(x, y, 2) / airlight[2]);
      mins.at(x, y) = m;
    }
  }
  Map2D t = min_filter(mins, patch);
  for (double& v : t.values) v = std::clamp(1.0 - v, 0.0, 1.0);
  return t;
}

SkyMask sky_mask(const RgbImage& img) {
  if (img.height() < 2) throw DomainError("sky_mask: image needs at least 2 rows");
  SkyMask mask(img.width(), img.height(), 0);
  const std::size_t rows = img.height() / 2;
  bool any = false;
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const float r = img.at(x, y, 0), g = img.at(x, y, 1), b = img.at(x, y, 2);
      if (b >= r && b >= g - 0.05f) {
        mask.at(x, y) = 1;
        any = true;
      }
    }
  }
  if (!any) {
    for (std::size_t y = 0; y < rows; ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) mask.at(x, y) = 1;
    }
  }
  return mask;
}

double sky_blue_mean(const RgbImage& img, const SkyMask& mask) {
  check_mask(img, mask, "sky_blue_mean");
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      if (mask.at(x, y)) {
        s += img.at(x, y, 2);
        ++n;
      }
    }
  }
  return s / static_cast<double>(n);
}

double sky_gradient(const RgbImage& img, const SkyMask& mask) {
  check_mask(img, mask, "sky_gradient");
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t y = 1; y + 1 < img.height(); ++y) {
    for (std::size_t x = 1; x + 1 < img.width(); ++x) {
      if (!mask.at(x, y)) continue;
      const double lap = img.luminance(x - 1, y) + img.luminance(x + 1, y) + img.luminance(x, y - 1) +
                         img.luminance(x, y + 1) - 4.0 * img.luminance(x, y);
      s += std::abs(lap);
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

double rms_contrast(const RgbImage& img) {
  require_non_empty(img, "rms_contrast");
  const double n = static_cast<double>(img.pixels());
  // Deviations are taken from the first pixel so a constant image gives exactly 0.
  const double ref = img.luminance(0, 0);
  double mean = 0.0;
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) mean += img.luminance(x, y) - ref;
  }
  mean /= n;
  double ss = 0.0;
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double d = img.luminance(x, y) - ref - mean;
      ss += d * d;
    }
  }
  return std::sqrt(ss / n);
}

double image_entropy(const RgbImage& img) {
  require_non_empty(img, "image_entropy");
  std::array<std::size_t, 256> hist{};
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double l = std::clamp(img.luminance(x, y), 0.0, 1.0);
      ++hist[static_cast<std::size_t>(std::lround(l * 255.0))];
    }
  }
  const double n = static_cast<double>(img.pixels());
  double h = 0.0;
  for (std::size_t count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // no -0.0
}

FeatureVector feature_vector(const RgbImage& img, std::optional<double> humidity, std::size_t patch) {
  require_non_empty(img, "feature_vector");
  FeatureVector f;
  const Map2D dark = dark_channel(img, patch);
  const Rgb a = estimate_airlight(img, dark);
  Rgb safe = a;
  // A black scene has no air-light estimate; treat it as unit air-light.
  for (double& c : safe) {
    if (!(c > 0.0)) c = 1.0;
  }
  const Map2D t = transmission_map(img, safe, patch);
  f.transmission_stat = std::accumulate(t.values.begin(), t.values.end(), 0.0) / static_cast<double>(t.values.size());
  const SkyMask mask = sky_mask(img);
  f.blue_mean = sky_blue_mean(img, mask);
  f.sky_gradient = sky_gradient(img, mask);
  f.rms_contrast = rms_contrast(img);
  f.entropy = image_entropy(img);
  f.humidity = humidity;
  return f;
}

}  // namespace pm25::haze
