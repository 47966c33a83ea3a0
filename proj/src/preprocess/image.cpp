#include <algorithm>
#include <cmath>
#include <string>

#include "pm25/errors.hpp"
#include "pm25/preprocess/image.hpp"

namespace pm25::preprocess {

namespace {

std::string dims(std::size_t w, std::size_t h) { return std::to_string(w) + "x" + std::to_string(h); }

double luminance(double r, double g, double b) { return (299.0 * r + 587.0 * g + 114.0 * b) / 1000.0; }

// Source coordinate of a destination pixel centre, plus the two taps and the
// weight of the second.
struct Tap {
  std::size_t i0, i1;
  double frac;
};

std::vector<Tap> taps(std::size_t src, std::size_t dst) {
  std::vector<Tap> out(dst);
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (std::size_t d = 0; d < dst; ++d) {
    double s = (static_cast<double>(d) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(s));
    const std::size_t i1 = std::min(i0 + 1, src - 1);
    out[d] = {i0, i1, s - static_cast<double>(i0)};
  }
  return out;
}

}  // namespace

ProcessedImage::ProcessedImage(std::vector<float> hwc) : data_(std::move(hwc)) {
  if (data_.size() != kHeight * kWidth * 3) {
    throw ShapeError("processed image must hold 120x200x3 values, got " + std::to_string(data_.size()));
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 1.0f)) throw DomainError("processed image values must lie in [0, 1]");
  }
}

haze::RgbImage ProcessedImage::to_rgb() const { return haze::RgbImage(kWidth, kHeight, data_); }

RawImage resize(const RawImage& img, std::size_t width, std::size_t height) {
  if (img.width == 0 || img.height == 0) throw ShapeError("cannot resize a " + dims(img.width, img.height) + " image");
  if (width == 0 || height == 0) throw ShapeError("resize target " + dims(width, height) + " is empty");
  if (img.rgb.size() != img.width * img.height * 3) throw ShapeError("raw image buffer does not match its size");
  if (img.width == width && img.height == height) return img;

  const auto tx = taps(img.width, width);
  const auto ty = taps(img.height, height);
  RawImage out(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    const Tap& vy = ty[y];
    for (std::size_t x = 0; x < width; ++x) {
      const Tap& vx = tx[x];
      for (std::size_t c = 0; c < 3; ++c) {
        const double p00 = img.at(vx.i0, vy.i0, c), p10 = img.at(vx.i1, vy.i0, c);
        const double p01 = img.at(vx.i0, vy.i1, c), p11 = img.at(vx.i1, vy.i1, c);
        const double top = p00 + (p10 - p00) * vx.frac;
        const double bottom = p01 + (p11 - p01) * vx.frac;
        const double v = top + (bottom - top) * vy.frac;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

RawImage crop_sky(const RawImage& img) {
  if (img.width != kResizeSide || img.height != kResizeSide) {
    throw ShapeError("crop_sky expects a 200x200 image, got " + dims(img.width, img.height));
  }
  RawImage out(kResizeSide, kCropRows);
  std::copy_n(img.rgb.begin(), out.rgb.size(), out.rgb.begin());
  return out;
}

ProcessedImage normalize(const RawImage& img) {
  if (img.width != ProcessedImage::kWidth || img.height != ProcessedImage::kHeight) {
    throw ShapeError("normalize expects a 200x120 image, got " + dims(img.width, img.height));
  }
  std::vector<float> v(img.rgb.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(img.rgb[i] / 255.0);
  return ProcessedImage(std::move(v));
}

ProcessedImage blacken_lower(const ProcessedImage& img, float threshold) {
  if (!(threshold >= 0.0f && threshold <= 1.0f)) throw DomainError("blacken threshold must lie in [0, 1]");
  std::vector<float> v = img.data();
  constexpr std::size_t W = ProcessedImage::kWidth, H = ProcessedImage::kHeight;
  for (std::size_t y = H / 2; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      float* p = &v[(y * W + x) * 3];
      if (luminance(p[0], p[1], p[2]) < threshold) p[0] = p[1] = p[2] = 0.0f;
    }
  }
  return ProcessedImage(std::move(v));
}

RawImage blacken_lower(const RawImage& img, float threshold) {
  if (!(threshold >= 0.0f && threshold <= 1.0f)) throw DomainError("blacken threshold must lie in [0, 1]");
  RawImage out = img;
  for (std::size_t y = img.height / 2; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      if (luminance(out.at(x, y, 0), out.at(x, y, 1), out.at(x, y, 2)) < threshold) {
        out.at(x, y, 0) = out.at(x, y, 1) = out.at(x, y, 2) = 0;
      }
    }
  }
  return out;
}

ProcessedImage pipeline(const RawImage& raw) { return blacken_lower(normalize(crop_sky(resize(raw)))); }

}  // namespace pm25::preprocess
