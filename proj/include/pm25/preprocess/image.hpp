#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pm25/haze/features.hpp"
#include "pm25/nn/tensor.hpp"

namespace pm25::preprocess {

inline constexpr std::size_t kResizeSide = 200;
inline constexpr std::size_t kCropRows = 120;
inline constexpr float kBlackenThreshold = 0.5f;

// Interleaved 8-bit RGB, row-major.
struct RawImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> rgb;

  RawImage() = default;
  RawImage(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), rgb(w * h * 3, fill) {}

  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c) { return rgb[(y * width + x) * 3 + c]; }
  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c) const { return rgb[(y * width + x) * 3 + c]; }
};

// 120 x 200 x 3 floats in [0, 1].
class ProcessedImage {
 public:
  static constexpr std::size_t kHeight = kCropRows;
  static constexpr std::size_t kWidth = kResizeSide;

  ProcessedImage() : data_(kHeight * kWidth * 3, 0.0f) {}
  // Throws ShapeError for the wrong size, DomainError for values outside [0, 1].
  explicit ProcessedImage(std::vector<float> hwc);

  float at(std::size_t x, std::size_t y, std::size_t c) const { return data_[(y * kWidth + x) * 3 + c]; }
  const std::vector<float>& data() const { return data_; }

  haze::RgbImage to_rgb() const;

 private:
  std::vector<float> data_;
};

// Bilinear resample with half-pixel centres, no antialiasing, rounded back to
// 8 bits. Same-size input is returned unchanged.
RawImage resize(const RawImage& img, std::size_t width = kResizeSide, std::size_t height = kResizeSide);

// Keeps the top 120 rows of a 200 x 200 image.
RawImage crop_sky(const RawImage& img);

// v / 255 on a 120 x 200 image.
ProcessedImage normalize(const RawImage& img);

// Sets pixels in rows 60..119 whose luminance is below `threshold` to black.
ProcessedImage blacken_lower(const ProcessedImage& img, float threshold = kBlackenThreshold);
// Same rule on raw 0..255 values, with the threshold taken literally; only
// useful to show that the pipeline order matters.
RawImage blacken_lower(const RawImage& img, float threshold = kBlackenThreshold);

// resize -> crop_sky -> normalize -> blacken_lower.
ProcessedImage pipeline(const RawImage& raw);

// Decodes any format OpenCV reads. Throws DataError naming the path.
RawImage load_image(const std::filesystem::path& path);
void save_image(const RawImage& img, const std::filesystem::path& path);
// 8-bit preview of a processed image (round(v * 255)).
void save_preview(const ProcessedImage& img, const std::filesystem::path& path);

struct BatchResult {
  nn::Tensor images;                // (n, 120, 200, 3)
  std::vector<std::size_t> kept;    // input index of each row of `images`
  std::vector<std::string> errors;  // one message per skipped path
};

// Runs the pipeline over `paths` in order. With fail_fast the first
// undecodable file throws DataError; otherwise it is skipped and logged.
BatchResult batch(const std::vector<std::filesystem::path>& paths, bool fail_fast = true);

nn::Tensor stack(const std::vector<ProcessedImage>& images);

// Packed batch file: four little-endian u32 (n, 120, 200, 3) then n*72000
// little-endian float32 values.
void write_batch_file(const nn::Tensor& images, const std::filesystem::path& path);
nn::Tensor read_batch_file(const std::filesystem::path& path);

}  // namespace pm25::preprocess
