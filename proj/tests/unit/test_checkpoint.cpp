#include <cstring>
#include <fstream>
#include <iterator>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "pm25/model/dcnn.hpp"
#include "pm25/nn/checkpoint.hpp"

using namespace pm25;
using nn::CheckpointError;
using Kind = nn::CheckpointError::Kind;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

Kind load_error(const std::filesystem::path& p) {
  try {
    nn::load_checkpoint(p);
  } catch (const CheckpointError& e) {
    return e.kind();
  }
  FAIL("checkpoint loaded");
  return Kind::Io;
}

nn::Network<float> trained_small(std::uint64_t seed) {
  auto m = model::build_model(model::compact_model_spec(), seed);
  auto& net = m.network();
  std::mt19937_64 rng(seed);
  // Touch running statistics so they differ from their initial values.
  net.forward(test::random_tensor<float>(nn::Shape::nhwc(2, 120, 200, 3), rng, 0.0, 1.0), nn::Mode::Train);
  return net;
}

}  // namespace

TEST_CASE("round trip is bit exact") {
  const auto dir = test::temp_dir("ckpt_roundtrip");
  const auto net = trained_small(3);
  nn::save_checkpoint(net, dir / "a.ckpt");
  auto back = nn::load_checkpoint(dir / "a.ckpt");
  CHECK(back.specs() == net.specs());
  CHECK(back.input_shape() == net.input_shape());
  auto src = const_cast<nn::Network<float>&>(net).parameters();
  auto dst = back.parameters();
  REQUIRE(src.size() == dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    CHECK(src[i].ref.name == dst[i].ref.name);
    const auto a = src[i].ref.value->values(), b = dst[i].ref.value->values();
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
  }
  // Saving again reproduces the same file.
  nn::save_checkpoint(back, dir / "b.ckpt");
  CHECK(slurp(dir / "a.ckpt") == slurp(dir / "b.ckpt"));
}

TEST_CASE("header reports the full parameter count") {
  const auto dir = test::temp_dir("ckpt_header");
  const auto m = model::build_model(model::dcnn_model_spec(), 0);
  model::save(m, dir / "full.ckpt");
  const auto h = nn::read_checkpoint_header(dir / "full.ckpt");
  CHECK(h.parameter_count == 4849601);
  CHECK(h.layers.size() == 19);
  CHECK(h.format_version == nn::kCheckpointVersion);
  CHECK(std::filesystem::file_size(dir / "full.ckpt") > 4 * 4849601);
}

TEST_CASE("damaged checkpoints are rejected with a reason") {
  const auto dir = test::temp_dir("ckpt_damage");
  nn::save_checkpoint(trained_small(1), dir / "ok.ckpt");
  const std::string good = slurp(dir / "ok.ckpt");

  CHECK(load_error(dir / "missing.ckpt") == Kind::Io);

  spit(dir / "short.ckpt", good.substr(0, good.size() - 3));
  CHECK(load_error(dir / "short.ckpt") == Kind::Truncated);
  spit(dir / "tiny.ckpt", good.substr(0, 10));
  CHECK(load_error(dir / "tiny.ckpt") == Kind::Truncated);

  std::string magic = good;
  magic[0] = 'X';
  spit(dir / "magic.ckpt", magic);
  CHECK(load_error(dir / "magic.ckpt") == Kind::Corrupt);

  std::string version = good;
  version[8] = 7;
  spit(dir / "version.ckpt", version);
  CHECK(load_error(dir / "version.ckpt") == Kind::VersionMismatch);

  spit(dir / "trailing.ckpt", good + "xx");
  CHECK(load_error(dir / "trailing.ckpt") == Kind::Corrupt);

  // Same length header, different filter count.
  std::string shape = good;
  const auto at = shape.find("\"filters\":8");
  REQUIRE(at != std::string::npos);
  shape[at + 10] = '9';
  spit(dir / "shape.ckpt", shape);
  CHECK(load_error(dir / "shape.ckpt") == Kind::ShapeMismatch);

  std::string json = good;
  json[21] = '#';
  spit(dir / "json.ckpt", json);
  CHECK(load_error(dir / "json.ckpt") == Kind::Corrupt);
}
