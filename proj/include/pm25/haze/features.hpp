#pragma once

#include <array>
#include <optional>
#include <vector>

namespace pm25::haze {

// Interleaved RGB, row-major, every value in [0, 1].
class RgbImage {
 public:
  RgbImage() = default;
  // Throws DomainError on a size mismatch or a value outside [0, 1].
  RgbImage(std::size_t width, std::size_t height, std::vector<float> rgb);
  // Constant colour.
  RgbImage(std::size_t width, std::size_t height, std::array<float, 3> colour);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixels() const { return width_ * height_; }
  bool empty() const { return pixels() == 0; }
  float at(std::size_t x, std::size_t y, std::size_t c) const { return data_[(y * width_ + x) * 3 + c]; }
  const std::vector<float>& data() const { return data_; }

  // 0.299 R + 0.587 G + 0.114 B, summed as (299 R + 587 G + 114 B) / 1000 so
  // a grey pixel keeps its exact value.
  double luminance(std::size_t x, std::size_t y) const;

 private:
  std::size_t width_ = 0, height_ = 0;
  std::vector<float> data_;
};

template <typename T>
struct Grid {
  std::size_t width = 0, height = 0;
  std::vector<T> values;

  Grid() = default;
  Grid(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), values(w * h, fill) {}
  T& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
  const T& at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
};

using Map2D = Grid<double>;
using SkyMask = Grid<unsigned char>;

using Rgb = std::array<double, 3>;

// exp(-beta * d).
double beer_lambert(double beta, double distance);

// Per-pixel channel minimum followed by a patch x patch minimum filter with
// clamp-to-edge borders. `patch` must be odd.
Map2D dark_channel(const RgbImage& img, std::size_t patch);

// Mean colour of the brightest 0.1% of the dark channel (at least one pixel;
// ties go to the earlier pixel in row-major order).
Rgb estimate_airlight(const RgbImage& img, const Map2D& dark);

// 1 - dark channel of I / A, clamped to [0, 1].
Map2D transmission_map(const RgbImage& img, const Rgb& airlight, std::size_t patch);

// Top half of the rows, restricted to pixels where blue >= red and
// blue >= green - 0.05. An empty result falls back to the whole top half.
SkyMask sky_mask(const RgbImage& img);

double sky_blue_mean(const RgbImage& img, const SkyMask& mask);

// Mean |4-neighbour Laplacian| of luminance over masked pixels that are not
// on the image border; 0 when the mask has no such pixel.
double sky_gradient(const RgbImage& img, const SkyMask& mask);

// Population standard deviation of luminance.
double rms_contrast(const RgbImage& img);

// Shannon entropy (bits) of luminance quantised to 256 levels,
// bin = round(255 L).
double image_entropy(const RgbImage& img);

struct FeatureVector {
  double transmission_stat = 0.0;  // mean of the transmission map
  double blue_mean = 0.0;
  double sky_gradient = 0.0;
  double rms_contrast = 0.0;
  double entropy = 0.0;
  std::optional<double> humidity;  // relative %, passed through
};

inline constexpr std::size_t kDefaultPatch = 15;

FeatureVector feature_vector(const RgbImage& img, std::optional<double> humidity = std::nullopt,
                             std::size_t patch = kDefaultPatch);

}  // namespace pm25::haze
