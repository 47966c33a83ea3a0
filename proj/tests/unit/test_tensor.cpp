#include <limits>

#include "doctest.h"
#include "pm25/errors.hpp"
#include "pm25/nn/tensor.hpp"

using namespace pm25;
using nn::Shape;

TEST_CASE("shape accessors and printing") {
  const Shape s = Shape::nhwc(2, 120, 200, 3);
  CHECK(s.rank() == 4);
  CHECK(s.count() == 2 * 120 * 200 * 3);
  CHECK(s.batch() == 2);
  CHECK(s.height() == 120);
  CHECK(s.width() == 200);
  CHECK(s.channels() == 3);
  CHECK(s.to_string() == "(2, 120, 200, 3)");
  CHECK(s.to_string(true) == "(None, 120, 200, 3)");
  CHECK(s.with_batch(7).batch() == 7);

  const Shape f = Shape::flat(4, 25600);
  CHECK(f.rank() == 2);
  CHECK(f.height() == 1);
  CHECK(f.channels() == 25600);
  CHECK(f.to_string(true) == "(None, 25600)");
}

TEST_CASE("tensor indexing is channels-last") {
  nn::Tensor t(Shape::nhwc(2, 3, 4, 5));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(i);
  CHECK(t.at(0, 0, 0, 1) == 1.0f);
  CHECK(t.at(0, 0, 1, 0) == 5.0f);
  CHECK(t.at(0, 1, 0, 0) == 20.0f);
  CHECK(t.at(1, 0, 0, 0) == 60.0f);
}

TEST_CASE("reshape keeps data and rejects a different element count") {
  nn::Tensor t(Shape::nhwc(2, 2, 2, 2), 1.5f);
  const auto r = t.reshaped(Shape::flat(2, 8));
  CHECK(r.shape() == Shape::flat(2, 8));
  CHECK(r[15] == 1.5f);
  CHECK_THROWS_AS(t.reshaped(Shape::flat(2, 7)), ShapeError);
}

TEST_CASE("slice and gather along the batch") {
  nn::Tensor t(Shape::nhwc(4, 1, 1, 2));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(i);
  const auto s = t.slice_batch(1, 2);
  CHECK(s.shape().batch() == 2);
  CHECK(s[0] == 2.0f);
  CHECK(s[3] == 5.0f);
  CHECK_THROWS_AS(t.slice_batch(3, 2), ShapeError);

  const std::size_t idx[] = {3, 0, 3};
  const auto g = nn::gather_batch(t, std::span<const std::size_t>(idx));
  CHECK(g.shape().batch() == 3);
  CHECK(g[0] == 6.0f);
  CHECK(g[2] == 0.0f);
  CHECK(g[5] == 7.0f);
  const std::size_t bad[] = {4};
  CHECK_THROWS_AS(nn::gather_batch(t, std::span<const std::size_t>(bad)), ShapeError);
}

TEST_CASE("finite check and cast") {
  nn::TensorD t(Shape::flat(1, 3), 0.25);
  CHECK(t.all_finite());
  const auto f = t.cast<float>();
  CHECK(f[2] == 0.25f);
  t[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(t.all_finite());
}
