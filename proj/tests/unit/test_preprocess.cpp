#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "pm25/errors.hpp"
#include "pm25/preprocess/image.hpp"

using namespace pm25;
using namespace pm25::preprocess;

namespace {

RawImage noise(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RawImage img(w, h);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng() % 256);
  return img;
}

}  // namespace

TEST_CASE("resize") {
  const auto big = resize(RawImage(4000, 3000, 9));
  CHECK(big.width == 200);
  CHECK(big.height == 200);
  for (auto v : big.rgb) CHECK(v == 9);

  const auto same = noise(200, 200, 1);
  CHECK(resize(same).rgb == same.rgb);

  RawImage colour(37, 91);
  for (std::size_t i = 0; i < colour.rgb.size(); i += 3) {
    colour.rgb[i] = 10;
    colour.rgb[i + 1] = 200;
    colour.rgb[i + 2] = 77;
  }
  const auto r = resize(colour);
  for (std::size_t i = 0; i < r.rgb.size(); i += 3) {
    CHECK(r.rgb[i] == 10);
    CHECK(r.rgb[i + 1] == 200);
    CHECK(r.rgb[i + 2] == 77);
  }
  CHECK_THROWS_AS(resize(RawImage(0, 5)), ShapeError);
}

TEST_CASE("bilinear upsample of a two-pixel row") {
  RawImage two(2, 1);
  two.at(0, 0, 0) = 0;
  two.at(1, 0, 0) = 200;
  const auto up = resize(two, 4, 1);
  // Half-pixel centres: source x = (i + 0.5) / 2 - 0.5 -> -0.25, 0.25, 0.75, 1.25.
  CHECK(up.at(0, 0, 0) == 0);
  CHECK(up.at(1, 0, 0) == 50);
  CHECK(up.at(2, 0, 0) == 150);
  CHECK(up.at(3, 0, 0) == 200);
}

TEST_CASE("crop keeps the sky rows") {
  RawImage img(200, 200);
  for (std::size_t y = 0; y < 200; ++y) {
    for (std::size_t x = 0; x < 200; ++x) img.at(x, y, y < 120 ? 2 : 0) = 255;
  }
  const auto c = crop_sky(img);
  CHECK(c.width == 200);
  CHECK(c.height == 120);
  for (std::size_t i = 0; i < c.rgb.size(); i += 3) {
    CHECK(c.rgb[i] == 0);
    CHECK(c.rgb[i + 2] == 255);
  }
  CHECK_THROWS_AS(crop_sky(c), ShapeError);
}

TEST_CASE("normalize") {
  RawImage img(200, 120);
  img.at(0, 0, 0) = 255;
  img.at(1, 0, 0) = 128;
  const auto p = normalize(img);
  CHECK(p.at(0, 0, 0) == 1.0f);
  CHECK(p.at(1, 0, 0) == doctest::Approx(128.0 / 255.0));
  CHECK(p.at(2, 0, 0) == 0.0f);
  CHECK_THROWS_AS(normalize(RawImage(200, 200)), ShapeError);
}

TEST_CASE("blacken lower band") {
  std::vector<float> v(120 * 200 * 3);
  for (std::size_t y = 0; y < 120; ++y) {
    for (std::size_t i = 0; i < 600; ++i) v[y * 600 + i] = y < 60 ? 0.2f : 0.3f;
  }
  const auto out = blacken_lower(ProcessedImage(v));
  for (std::size_t y = 0; y < 120; ++y) {
    for (std::size_t x = 0; x < 200; ++x) {
      for (std::size_t c = 0; c < 3; ++c) CHECK(out.at(x, y, c) == (y < 60 ? 0.2f : 0.0f));
    }
  }
  const ProcessedImage bright(std::vector<float>(72000, 0.5f));
  CHECK(blacken_lower(bright).data() == bright.data());
  CHECK_THROWS_AS(blacken_lower(bright, 1.5f), DomainError);
  CHECK_THROWS_AS(blacken_lower(bright, -0.1f), DomainError);
}

TEST_CASE("processed image validation") {
  CHECK_THROWS_AS(ProcessedImage(std::vector<float>(100, 0.0f)), ShapeError);
  CHECK_THROWS_AS(ProcessedImage(std::vector<float>(72000, 1.01f)), DomainError);
  const auto rgb = ProcessedImage(std::vector<float>(72000, 0.25f)).to_rgb();
  CHECK(rgb.width() == 200);
  CHECK(rgb.height() == 120);
}

TEST_CASE("pipeline output shape and range") {
  for (auto [w, h] : {std::pair<std::size_t, std::size_t>{640, 480}, {31, 500}, {200, 200}, {1, 1}}) {
    const auto raw = noise(w, h, w * 7 + h);
    const auto p = pipeline(raw);
    REQUIRE(p.data().size() == 72000);
    for (float v : p.data()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
    // Blackening never brightens anything.
    const auto unblackened = normalize(crop_sky(resize(raw)));
    for (std::size_t i = 0; i < 72000; ++i) CHECK(p.data()[i] <= unblackened.data()[i]);
    // Lower band pixels below the threshold are exactly black.
    const auto rgb = unblackened.to_rgb();
    std::size_t wrong = 0;
    for (std::size_t y = 60; y < 120; ++y) {
      for (std::size_t x = 0; x < 200; ++x) {
        if (rgb.luminance(x, y) < 0.5 && p.at(x, y, 0) + p.at(x, y, 1) + p.at(x, y, 2) != 0.0f) ++wrong;
      }
    }
    CHECK(wrong == 0);
  }
}

TEST_CASE("blackening before normalizing gives a different image") {
  RawImage raw(200, 200, 100);
  const auto right = pipeline(raw);
  const auto wrong = normalize(blacken_lower(crop_sky(resize(raw))));
  CHECK(right.data() != wrong.data());
  CHECK(right.at(0, 100, 0) == 0.0f);
  CHECK(wrong.at(0, 100, 0) > 0.0f);
}

TEST_CASE("image files and batches") {
  const auto dir = test::temp_dir("preprocess_io");
  const auto a = noise(64, 48, 1), b = noise(300, 200, 2);
  save_image(a, dir / "a.png");
  save_image(b, dir / "b.png");
  std::ofstream(dir / "junk.jpg") << "not an image";
  CHECK(load_image(dir / "a.png").rgb == a.rgb);
  CHECK_THROWS_AS(load_image(dir / "missing.png"), DataError);
  CHECK_THROWS_AS(load_image(dir / "junk.jpg"), DataError);

  const auto empty = batch({});
  CHECK(empty.images.shape().batch() == 0);

  const std::vector<std::filesystem::path> paths = {dir / "a.png", dir / "junk.jpg", dir / "b.png"};
  CHECK_THROWS_AS(batch(paths, true), DataError);
  const auto r = batch(paths, false);
  CHECK(r.images.shape() == nn::Shape::nhwc(2, 120, 200, 3));
  CHECK(r.kept == std::vector<std::size_t>{0, 2});
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].find("junk.jpg") != std::string::npos);
  const auto pa = pipeline(a);
  for (std::size_t i = 0; i < 72000; ++i) CHECK(r.images[i] == pa.data()[i]);

  std::vector<ProcessedImage> eight(8, pa);
  CHECK(stack(eight).shape() == nn::Shape::nhwc(8, 120, 200, 3));

  write_batch_file(r.images, dir / "batch.bin");
  CHECK(std::filesystem::file_size(dir / "batch.bin") == 16 + 2 * 72000 * 4);
  const auto back = read_batch_file(dir / "batch.bin");
  CHECK(back.shape() == r.images.shape());
  CHECK(std::memcmp(back.data(), r.images.data(), r.images.size() * 4) == 0);
  std::filesystem::resize_file(dir / "batch.bin", 100);
  CHECK_THROWS_AS(read_batch_file(dir / "batch.bin"), DataError);

  save_preview(pa, dir / "preview.png");
  const auto pv = load_image(dir / "preview.png");
  CHECK(pv.width == 200);
  CHECK(pv.height == 120);
}
