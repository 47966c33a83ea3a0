#include "pm25/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>

#include "json.hpp"

namespace pm25::nn {

namespace {

using nlohmann::json;
using Kind = CheckpointError::Kind;

constexpr char kMagic[8] = {'P', 'M', '2', '5', 'C', 'K', 'P', 'T'};
constexpr std::size_t kPreambleBytes = sizeof(kMagic) + 4 + 8;

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

json spec_to_json(const LayerSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"pad_h", s.pad_h},
          {"pad_w", s.pad_w},
          {"filters", s.filters},
          {"kernel", s.kernel},
          {"stride", s.stride},
          {"pool", s.pool},
          {"units", s.units},
          {"rate", s.rate},
          {"activation", std::string(to_string(s.activation))}};
}

LayerSpec spec_from_json(const json& j) {
  LayerSpec s;
  s.kind = layer_kind_from_string(j.at("kind").get<std::string>());
  s.pad_h = j.at("pad_h").get<std::size_t>();
  s.pad_w = j.at("pad_w").get<std::size_t>();
  s.filters = j.at("filters").get<std::size_t>();
  s.kernel = j.at("kernel").get<std::size_t>();
  s.stride = j.at("stride").get<std::size_t>();
  s.pool = j.at("pool").get<std::size_t>();
  s.units = j.at("units").get<std::size_t>();
  s.rate = j.at("rate").get<double>();
  s.activation = activation_from_string(j.at("activation").get<std::string>());
  return s;
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(Kind::Io, "cannot open checkpoint " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Parsed {
  CheckpointHeader header;
  std::size_t blob_offset = 0;
};

Parsed parse(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
  const std::string where = " in " + path.string();
  if (bytes.size() < kPreambleBytes) {
    if (bytes.size() >= sizeof(kMagic) && std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
      throw CheckpointError(Kind::Corrupt, "bad magic" + where);
    }
    throw CheckpointError(Kind::Truncated, "checkpoint preamble is truncated" + where);
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError(Kind::Corrupt, "bad magic" + where);
  }
  const auto version = get_le<std::uint32_t>(bytes.data() + 8);
  if (version != kCheckpointVersion) {
    throw CheckpointError(Kind::VersionMismatch, "checkpoint format version " + std::to_string(version) +
                                                     ", this build reads version " +
                                                     std::to_string(kCheckpointVersion) + where);
  }
  const auto header_bytes = get_le<std::uint64_t>(bytes.data() + 12);
  if (header_bytes > bytes.size() - kPreambleBytes) {
    throw CheckpointError(Kind::Truncated, "checkpoint header is truncated" + where);
  }

  Parsed out;
  out.blob_offset = kPreambleBytes + header_bytes;
  auto& h = out.header;
  h.format_version = version;
  try {
    const json j = json::parse(bytes.begin() + kPreambleBytes, bytes.begin() + static_cast<std::ptrdiff_t>(out.blob_offset));
    if (j.at("format_version").get<std::uint32_t>() != version) {
      throw CheckpointError(Kind::VersionMismatch, "header version disagrees with preamble" + where);
    }
    const auto in = j.at("input_shape").get<std::vector<std::size_t>>();
    if (in.size() != 4) throw CheckpointError(Kind::ShapeMismatch, "input shape must have rank 4" + where);
    h.input_shape = Shape::nhwc(in[0], in[1], in[2], in[3]);
    h.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& l : j.at("layers")) h.layers.push_back(spec_from_json(l));
    for (const auto& t : j.at("tensors")) {
      h.tensors.push_back(
          {t.at("layer").get<std::size_t>(), t.at("name").get<std::string>(), t.at("shape").get<std::vector<std::size_t>>()});
    }
    h.parameter_count = j.at("parameter_count").get<std::size_t>();
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(Kind::Corrupt, std::string("unreadable checkpoint header: ") + e.what() + where);
  }
  return out;
}

}  // namespace

CheckpointError::CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

void save_checkpoint(const Network<float>& net, const std::filesystem::path& path) {
  static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
  auto& mutable_net = const_cast<Network<float>&>(net);
  const auto params = mutable_net.parameters();

  json layers = json::array();
  for (const auto& s : net.specs()) layers.push_back(spec_to_json(s));
  json tensors = json::array();
  for (const auto& p : params) {
    tensors.push_back({{"layer", p.layer}, {"name", p.ref.name}, {"shape", p.ref.value->shape().dims()}});
  }
  const json header = {{"format", "pm25-checkpoint"},
                       {"format_version", kCheckpointVersion},
                       {"input_shape", net.input_shape().dims()},
                       {"seed", net.seed()},
                       {"layers", layers},
                       {"tensors", tensors},
                       {"parameter_count", net.parameter_count()}};
  const std::string text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  out.reserve(out.size() + 4 * net.parameter_count());
  for (const auto& p : params) {
    for (float v : p.ref.value->values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError(Kind::Io, "cannot write checkpoint " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw CheckpointError(Kind::Io, "short write to " + path.string());
}

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path) {
  return parse(read_file(path), path).header;
}

Network<float> load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const Parsed parsed = parse(bytes, path);
  const auto& h = parsed.header;
  const std::string where = " in " + path.string();

  std::optional<Network<float>> built;
  try {
    built.emplace(h.input_shape, h.layers, h.seed);
  } catch (const ShapeError& e) {
    throw CheckpointError(Kind::ShapeMismatch, std::string("layer table does not chain: ") + e.what() + where);
  }
  Network<float>& net = *built;
  auto params = net.parameters();
  if (params.size() != h.tensors.size()) {
    throw CheckpointError(Kind::ShapeMismatch, "tensor table lists " + std::to_string(h.tensors.size()) +
                                                   " tensors, the layers define " + std::to_string(params.size()) +
                                                   where);
  }
  std::size_t total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = h.tensors[i];
    if (e.layer != params[i].layer || e.name != params[i].ref.name || e.shape != params[i].ref.value->shape().dims()) {
      throw CheckpointError(Kind::ShapeMismatch, "tensor table entry " + std::to_string(i) + " (" + e.name +
                                                     ") does not match the layer definition" + where);
    }
    total += params[i].ref.value->size();
  }
  if (total != h.parameter_count) {
    throw CheckpointError(Kind::ShapeMismatch, "header reports " + std::to_string(h.parameter_count) +
                                                   " parameters, tensor table holds " + std::to_string(total) + where);
  }
  const std::size_t expected = parsed.blob_offset + 4 * total;
  if (bytes.size() < expected) {
    throw CheckpointError(Kind::Truncated, "parameter blobs are truncated (" + std::to_string(bytes.size()) + " of " +
                                               std::to_string(expected) + " bytes)" + where);
  }
  if (bytes.size() > expected) {
    throw CheckpointError(Kind::Corrupt, "unexpected trailing bytes after parameter blobs" + where);
  }
  const unsigned char* p = bytes.data() + parsed.blob_offset;
  for (auto& param : params) {
    for (float& v : param.ref.value->values()) {
      v = std::bit_cast<float>(get_le<std::uint32_t>(p));
      p += 4;
    }
  }
  return std::move(net);
}

}  // namespace pm25::nn
