#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "pm25/errors.hpp"
#include "pm25/preprocess/image.hpp"

namespace pm25::preprocess {

namespace {

constexpr std::size_t kPixels = ProcessedImage::kHeight * ProcessedImage::kWidth * 3;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void write_bgr(const RawImage& img, const std::filesystem::path& path) {
  cv::Mat m(static_cast<int>(img.height), static_cast<int>(img.width), CV_8UC3);
  for (std::size_t y = 0; y < img.height; ++y) {
    auto* row = m.ptr<std::uint8_t>(static_cast<int>(y));
    for (std::size_t x = 0; x < img.width; ++x) {
      row[3 * x + 0] = img.at(x, y, 2);
      row[3 * x + 1] = img.at(x, y, 1);
      row[3 * x + 2] = img.at(x, y, 0);
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw DataError("cannot write image " + path.string() + ": " + e.what());
  }
  if (!ok) throw DataError("cannot write image " + path.string());
}

}  // namespace

RawImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw DataError("image not found: " + path.string());
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw DataError("cannot decode image " + path.string() + ": " + e.what());
  }
  if (m.empty() || m.type() != CV_8UC3) throw DataError("cannot decode image " + path.string());
  RawImage out(static_cast<std::size_t>(m.cols), static_cast<std::size_t>(m.rows));
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      out.at(x, y, 0) = row[3 * x + 2];
      out.at(x, y, 1) = row[3 * x + 1];
      out.at(x, y, 2) = row[3 * x + 0];
    }
  }
  return out;
}

void save_image(const RawImage& img, const std::filesystem::path& path) {
  if (img.width == 0 || img.height == 0 || img.rgb.size() != img.width * img.height * 3) {
    throw ShapeError("cannot save an empty or malformed image");
  }
  write_bgr(img, path);
}

void save_preview(const ProcessedImage& img, const std::filesystem::path& path) {
  RawImage raw(ProcessedImage::kWidth, ProcessedImage::kHeight);
  for (std::size_t i = 0; i < kPixels; ++i) raw.rgb[i] = static_cast<std::uint8_t>(std::lround(img.data()[i] * 255.0f));
  write_bgr(raw, path);
}

nn::Tensor stack(const std::vector<ProcessedImage>& images) {
  nn::Tensor t(nn::Shape::nhwc(images.size(), ProcessedImage::kHeight, ProcessedImage::kWidth, 3));
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::copy(images[i].data().begin(), images[i].data().end(), t.data() + i * kPixels);
  }
  return t;
}

BatchResult batch(const std::vector<std::filesystem::path>& paths, bool fail_fast) {
  BatchResult r;
  std::vector<ProcessedImage> done;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    try {
      done.push_back(pipeline(load_image(paths[i])));
      r.kept.push_back(i);
    } catch (const DataError& e) {
      if (fail_fast) throw;
      r.errors.push_back(e.what());
    }
  }
  r.images = stack(done);
  return r;
}

void write_batch_file(const nn::Tensor& images, const std::filesystem::path& path) {
  const auto& s = images.shape();
  if (s.rank() != 4 || s.height() != ProcessedImage::kHeight || s.width() != ProcessedImage::kWidth ||
      s.channels() != 3) {
    throw ShapeError("batch file holds (n, 120, 200, 3) tensors, got " + s.to_string());
  }
  std::string out;
  out.reserve(16 + 4 * images.size());
  put_u32(out, static_cast<std::uint32_t>(s.batch()));
  put_u32(out, ProcessedImage::kHeight);
  put_u32(out, ProcessedImage::kWidth);
  put_u32(out, 3);
  for (float v : images.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("short write to " + path.string());
}

nn::Tensor read_batch_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
  if (bytes.size() < 16) throw DataError(path.string() + ": batch header is truncated");
  const std::uint32_t n = get_u32(bytes.data()), h = get_u32(bytes.data() + 4), w = get_u32(bytes.data() + 8),
                      c = get_u32(bytes.data() + 12);
  if (h != ProcessedImage::kHeight || w != ProcessedImage::kWidth || c != 3) {
    throw DataError(path.string() + ": unexpected batch dimensions " + std::to_string(h) + "x" + std::to_string(w) +
                    "x" + std::to_string(c));
  }
  const std::size_t expected = 16 + 4 * static_cast<std::size_t>(n) * kPixels;
  if (bytes.size() != expected) {
    throw DataError(path.string() + ": batch file holds " + std::to_string(bytes.size()) + " bytes, expected " +
                    std::to_string(expected));
  }
  nn::Tensor t(nn::Shape::nhwc(n, h, w, c));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * i));
  return t;
}

}  // namespace pm25::preprocess
